#ifndef DOCKAUG_SRC_JSON_UTIL_H_
#define DOCKAUG_SRC_JSON_UTIL_H_

#include <string>

#include "dockaug/error.h"
#include "dockaug/geometry.h"
#include "json.hpp"

namespace dockaug::json_util {

using Json = nlohmann::ordered_json;

inline Json ToJson(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

inline Json ToJson(const Pose& p) {
  const Quat& q = p.orientation();
  Json j;
  j["position"] = ToJson(p.position());
  j["orientation"] = Json::array({q.w(), q.x(), q.y(), q.z()});
  return j;
}

inline Json ToJson(const PlanarPose& p) {
  Json j;
  j["x"] = p.x();
  j["y"] = p.y();
  j["yaw"] = p.yaw();
  return j;
}

// Field access with a format error naming the offending key path.
inline const Json& At(const Json& j, const std::string& key,
                      const std::string& where) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(ErrorKind::kFormat, "missing field '" + where + key + "'");
  }
  return j.at(key);
}

inline double Number(const Json& j, const std::string& where) {
  if (!j.is_number()) {
    throw Error(ErrorKind::kFormat, "field '" + where + "' is not a number");
  }
  return j.get<double>();
}

inline Vec3 Vec3From(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) {
    throw Error(ErrorKind::kFormat, "field '" + where + "' is not a 3-vector");
  }
  return Vec3(Number(j[0], where + "[0]"), Number(j[1], where + "[1]"),
              Number(j[2], where + "[2]"));
}

inline Pose PoseFrom(const Json& j, const std::string& where) {
  const Vec3 pos = Vec3From(At(j, "position", where + "."), where + ".position");
  const Json& q = At(j, "orientation", where + ".");
  if (!q.is_array() || q.size() != 4) {
    throw Error(ErrorKind::kFormat,
                "field '" + where + ".orientation' is not a quaternion");
  }
  return Pose(pos, Quat(Number(q[0], where), Number(q[1], where),
                        Number(q[2], where), Number(q[3], where)));
}

inline PlanarPose PlanarFrom(const Json& j, const std::string& where) {
  return PlanarPose(Number(At(j, "x", where + "."), where + ".x"),
                    Number(At(j, "y", where + "."), where + ".y"),
                    Number(At(j, "yaw", where + "."), where + ".yaw"));
}

}  // namespace dockaug::json_util

#endif  // DOCKAUG_SRC_JSON_UTIL_H_
