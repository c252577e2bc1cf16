#include "dockaug/scene.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json_util.h"

namespace dockaug {

using json_util::At;
using json_util::Json;
using json_util::Number;
using json_util::ToJson;

Shape Shape::Sphere(const Vec3& center, double radius) {
  Shape s;
  s.kind = Kind::kSphere;
  s.pose = Pose(center, Quat::Identity());
  s.radius = radius;
  return s;
}

Shape Shape::Box(const Pose& pose, const Vec3& half_extents) {
  Shape s;
  s.kind = Kind::kBox;
  s.pose = pose;
  s.half_extents = half_extents;
  return s;
}

double Shape::SignedDistance(const Vec3& p) const {
  if (kind == Kind::kSphere) return (p - pose.position()).norm() - radius;
  const Vec3 local =
      pose.orientation().conjugate() * (p - pose.position());
  const Vec3 q = local.cwiseAbs() - half_extents;
  const double outside = q.cwiseMax(0.0).norm();
  const double inside = std::min(q.maxCoeff(), 0.0);
  return outside + inside;
}

double Shape::Top() const {
  if (kind == Kind::kSphere) return pose.position().z() + radius;
  const Eigen::Matrix3d r = pose.rotation();
  return pose.position().z() + r.row(2).cwiseAbs().dot(half_extents);
}

double SegmentSignedDistance(const Shape& shape, const Vec3& a,
                             const Vec3& b) {
  const Vec3 d = b - a;
  if (shape.kind == Shape::Kind::kSphere) {
    const double len2 = d.squaredNorm();
    double t = 0.0;
    if (len2 > 0.0) {
      t = std::clamp((shape.pose.position() - a).dot(d) / len2, 0.0, 1.0);
    }
    return shape.SignedDistance(a + t * d);
  }
  // The signed distance to a convex set is convex along a line, so a golden
  // section search finds the segment minimum.
  const auto f = [&](double t) { return shape.SignedDistance(a + t * d); };
  constexpr double kInvPhi = 0.6180339887498949;
  double lo = 0.0, hi = 1.0;
  double x1 = hi - kInvPhi * (hi - lo), x2 = lo + kInvPhi * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < 90 && hi - lo > 1e-15; ++i) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = f(x2);
    }
  }
  return std::min({f(0.0), f(1.0), f1, f2});
}

std::optional<double> SegmentFirstHit(const Shape& shape, const Vec3& a,
                                      const Vec3& b) {
  const Vec3 d = b - a;
  if (shape.kind == Shape::Kind::kSphere) {
    const Vec3 m = a - shape.pose.position();
    const double qa = d.squaredNorm();
    const double qb = 2.0 * m.dot(d);
    const double qc = m.squaredNorm() - shape.radius * shape.radius;
    if (qc <= 0.0) return 0.0;
    if (qa == 0.0) return std::nullopt;
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc < 0.0) return std::nullopt;
    const double t = (-qb - std::sqrt(disc)) / (2.0 * qa);
    if (t < 0.0 || t > 1.0) return std::nullopt;
    return t;
  }
  const Quat inv = shape.pose.orientation().conjugate();
  const Vec3 o = inv * (a - shape.pose.position());
  const Vec3 dir = inv * d;
  double t_enter = 0.0, t_exit = 1.0;
  for (int axis = 0; axis < 3; ++axis) {
    const double h = shape.half_extents[axis];
    if (std::abs(dir[axis]) < 1e-300) {
      if (o[axis] < -h || o[axis] > h) return std::nullopt;
      continue;
    }
    double t0 = (-h - o[axis]) / dir[axis];
    double t1 = (h - o[axis]) / dir[axis];
    if (t0 > t1) std::swap(t0, t1);
    t_enter = std::max(t_enter, t0);
    t_exit = std::min(t_exit, t1);
    if (t_enter > t_exit) return std::nullopt;
  }
  return t_enter;
}

bool DiskIntersectsPolygon(const Eigen::Vector2d& center, double radius,
                           const Polygon2& polygon) {
  const std::size_t n = polygon.size();
  if (n == 0) return false;
  if (n == 1) return (polygon[0] - center).norm() < radius;
  bool all_left = true, all_right = true;
  double min_edge = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector2d& p = polygon[i];
    const Eigen::Vector2d& q = polygon[(i + 1) % n];
    const Eigen::Vector2d e = q - p;
    const Eigen::Vector2d w = center - p;
    const double cross = e.x() * w.y() - e.y() * w.x();
    all_left &= cross >= 0.0;
    all_right &= cross <= 0.0;
    const double len2 = e.squaredNorm();
    const double t = len2 > 0.0 ? std::clamp(w.dot(e) / len2, 0.0, 1.0) : 0.0;
    min_edge = std::min(min_edge, (p + t * e - center).norm());
  }
  if (n >= 3 && (all_left || all_right)) return true;
  return min_edge < radius;
}

bool Camera::InFrustum(const Vec3& world_point) const {
  const Vec3 c = pose.orientation().conjugate() *
                 (world_point - pose.position());
  if (c.z() <= 0.0) return false;
  return std::abs(std::atan2(c.x(), c.z())) <= 0.5 * hfov &&
         std::abs(std::atan2(c.y(), c.z())) <= 0.5 * vfov;
}

double Workspace::Margin(const PlanarPose& dock, const Vec3& p) const {
  const double r = (p.head<2>() - dock.xy()).norm();
  const double z = p.z();
  const double dr = std::max({r_min - r, 0.0, r - r_max});
  const double dz = std::max({z_min - z, 0.0, z - z_max});
  if (dr > 0.0 || dz > 0.0) return -std::hypot(dr, dz);
  return std::min({r - r_min, r_max - r, z - z_min, z_max - z});
}

Shape RobotModel::BodyAt(const PlanarPose& dock) const {
  const Pose base = PlanarToWorld(dock, base_height);
  const Pose center =
      Compose(base, Pose::Translation(0.0, 0.0, 0.5 * body_height));
  return Shape::Box(center, Vec3(body_half_extents.x(), body_half_extents.y(),
                                 0.5 * body_height));
}

const SceneObject* Scene::FindObject(const std::string& object_id) const {
  for (const SceneObject& o : objects) {
    if (o.id == object_id) return &o;
  }
  return nullptr;
}

const SceneObject* Scene::FindByLabel(Label label) const {
  for (const SceneObject& o : objects) {
    if (o.label && *o.label == label) return &o;
  }
  return nullptr;
}

LabelTable Scene::Labels() const {
  LabelTable table;
  for (const SceneObject& o : objects) {
    if (o.label) table.AddObject(o.id, *o.label);
  }
  return table;
}

void ValidateScene(const Scene& scene) {
  const Workspace& w = scene.workspace;
  if (!(w.r_min < w.r_max) || !(w.z_min < w.z_max)) {
    throw Error(ErrorKind::kInvariant,
                "scene '" + scene.id + "': empty workspace annulus");
  }
  const auto fov_ok = [](double f) { return f > 0.0 && f < std::numbers::pi; };
  if (!fov_ok(scene.camera.hfov) || !fov_ok(scene.camera.vfov)) {
    throw Error(ErrorKind::kInvariant,
                "scene '" + scene.id + "': camera fov outside (0, pi)");
  }
  if (!(scene.grasp_radius > 0.0)) {
    throw Error(ErrorKind::kInvariant,
                "scene '" + scene.id + "': grasp radius must be positive");
  }
  (void)scene.Labels();  // throws on conflicting labels
  for (const SceneObject& o : scene.objects) {
    if (o.label && o.points.empty()) {
      throw Error(ErrorKind::kInvariant,
                  "scene object '" + o.id + "' is labeled but has no points");
    }
  }
  if (scene.task) {
    std::visit(
        [&](const auto& t) {
          using T = std::decay_t<decltype(t)>;
          if constexpr (std::is_same_v<T, PickLift>) {
            if (!(t.dz > 0.0)) {
              throw Error(ErrorKind::kInvariant, "pick_lift dz must be > 0");
            }
          } else if constexpr (std::is_same_v<T, ReachPose>) {
            if (!(t.tolerance > 0.0)) {
              throw Error(ErrorKind::kInvariant,
                          "reach_pose tolerance must be > 0");
            }
          }
        },
        *scene.task);
  }
}

namespace {

Json ShapeToJson(const Shape& s) {
  Json j;
  if (s.kind == Shape::Kind::kSphere) {
    j["type"] = "sphere";
    j["pose"] = ToJson(s.pose);
    j["radius"] = s.radius;
  } else {
    j["type"] = "box";
    j["pose"] = ToJson(s.pose);
    j["half_extents"] = ToJson(s.half_extents);
  }
  return j;
}

Shape ShapeFromJson(const Json& j, const std::string& where) {
  const std::string type = At(j, "type", where + ".").get<std::string>();
  const Pose pose = json_util::PoseFrom(At(j, "pose", where + "."), where);
  if (type == "sphere") {
    return Shape::Sphere(pose.position(),
                         Number(At(j, "radius", where + "."), where));
  }
  if (type == "box") {
    return Shape::Box(pose, json_util::Vec3From(At(j, "half_extents", where + "."),
                                                where + ".half_extents"));
  }
  throw Error(ErrorKind::kFormat, "unknown shape type '" + type + "' at " + where);
}

Json PointsToJson(const std::vector<Vec3>& pts) {
  Json arr = Json::array();
  for (const Vec3& p : pts) arr.push_back(ToJson(p));
  return arr;
}

std::vector<Vec3> PointsFromJson(const Json& j, const std::string& where) {
  std::vector<Vec3> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(json_util::Vec3From(j[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

Json AabbToJson(const Aabb& b) {
  Json j;
  j["min"] = ToJson(b.min_corner);
  j["max"] = ToJson(b.max_corner);
  return j;
}

Aabb AabbFromJson(const Json& j, const std::string& where) {
  return Aabb(json_util::Vec3From(At(j, "min", where + "."), where + ".min"),
              json_util::Vec3From(At(j, "max", where + "."), where + ".max"));
}

Json TaskToJson(const SuccessPredicate& task) {
  Json j;
  std::visit(
      [&](const auto& t) {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, PickLift>) {
          j["kind"] = "pick_lift";
          j["object"] = t.object_id;
          j["dz"] = t.dz;
        } else if constexpr (std::is_same_v<T, PlaceInto>) {
          j["kind"] = "place_into";
          j["object"] = t.object_id;
          j["region"] = AabbToJson(t.region);
        } else {
          j["kind"] = "reach_pose";
          j["pose"] = ToJson(t.pose);
          j["tolerance"] = t.tolerance;
        }
      },
      task);
  return j;
}

SuccessPredicate TaskFromJson(const Json& j) {
  const std::string kind = At(j, "kind", "task.").get<std::string>();
  if (kind == "pick_lift") {
    return PickLift{At(j, "object", "task.").get<std::string>(),
                    Number(At(j, "dz", "task."), "task.dz")};
  }
  if (kind == "place_into") {
    return PlaceInto{At(j, "object", "task.").get<std::string>(),
                     AabbFromJson(At(j, "region", "task."), "task.region")};
  }
  if (kind == "reach_pose") {
    return ReachPose{json_util::PoseFrom(At(j, "pose", "task."), "task.pose"),
                     Number(At(j, "tolerance", "task."), "task.tolerance")};
  }
  throw Error(ErrorKind::kFormat, "unknown task kind '" + kind + "'");
}

}  // namespace

std::string SceneToJson(const Scene& scene) {
  Json j;
  j["id"] = scene.id;
  Json objects = Json::array();
  for (const SceneObject& o : scene.objects) {
    Json jo;
    jo["id"] = o.id;
    jo["label"] = o.label ? Json(o.label->code) : Json(nullptr);
    jo["movable"] = o.movable;
    jo["shape"] = ShapeToJson(o.shape);
    jo["points"] = PointsToJson(o.points);
    objects.push_back(std::move(jo));
  }
  j["objects"] = std::move(objects);
  j["background"] = PointsToJson(scene.background);
  Json cam;
  cam["pose"] = ToJson(scene.camera.pose);
  cam["hfov"] = scene.camera.hfov;
  cam["vfov"] = scene.camera.vfov;
  j["camera"] = std::move(cam);
  Json ws;
  ws["r_min"] = scene.workspace.r_min;
  ws["r_max"] = scene.workspace.r_max;
  ws["z_min"] = scene.workspace.z_min;
  ws["z_max"] = scene.workspace.z_max;
  j["workspace"] = std::move(ws);
  Json floor = Json::array();
  for (const Polygon2& poly : scene.floorplan) {
    Json jp = Json::array();
    for (const Eigen::Vector2d& v : poly) jp.push_back(Json::array({v.x(), v.y()}));
    floor.push_back(std::move(jp));
  }
  j["floorplan"] = std::move(floor);
  Json robot;
  robot["footprint_radius"] = scene.robot.footprint_radius;
  robot["body_half_extents"] = Json::array(
      {scene.robot.body_half_extents.x(), scene.robot.body_half_extents.y()});
  robot["body_height"] = scene.robot.body_height;
  robot["base_height"] = scene.robot.base_height;
  robot["home"] = ToJson(scene.robot.home);
  j["robot"] = std::move(robot);
  j["crop"] = AabbToJson(scene.crop);
  j["task"] = scene.task ? TaskToJson(*scene.task) : Json(nullptr);
  j["grasp_radius"] = scene.grasp_radius;
  return j.dump(1);
}

Scene SceneFromJson(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::kFormat, std::string("scene is not valid JSON: ") + e.what());
  }
  Scene s;
  try {
    s.id = At(j, "id", "").get<std::string>();
    const Json& objs = At(j, "objects", "");
    for (std::size_t i = 0; i < objs.size(); ++i) {
      const std::string where = "objects[" + std::to_string(i) + "]";
      const Json& jo = objs[i];
      SceneObject o;
      o.id = At(jo, "id", where + ".").get<std::string>();
      const Json& label = At(jo, "label", where + ".");
      if (!label.is_null()) o.label = Label{label.get<std::uint8_t>()};
      o.movable = At(jo, "movable", where + ".").get<bool>();
      o.shape = ShapeFromJson(At(jo, "shape", where + "."), where + ".shape");
      o.points = PointsFromJson(At(jo, "points", where + "."), where + ".points");
      s.objects.push_back(std::move(o));
    }
    s.background = PointsFromJson(At(j, "background", ""), "background");
    const Json& cam = At(j, "camera", "");
    s.camera.pose = json_util::PoseFrom(At(cam, "pose", "camera."), "camera.pose");
    s.camera.hfov = Number(At(cam, "hfov", "camera."), "camera.hfov");
    s.camera.vfov = Number(At(cam, "vfov", "camera."), "camera.vfov");
    const Json& ws = At(j, "workspace", "");
    s.workspace.r_min = Number(At(ws, "r_min", "workspace."), "workspace.r_min");
    s.workspace.r_max = Number(At(ws, "r_max", "workspace."), "workspace.r_max");
    s.workspace.z_min = Number(At(ws, "z_min", "workspace."), "workspace.z_min");
    s.workspace.z_max = Number(At(ws, "z_max", "workspace."), "workspace.z_max");
    for (const Json& jp : At(j, "floorplan", "")) {
      Polygon2 poly;
      for (const Json& v : jp) {
        poly.emplace_back(Number(v.at(0), "floorplan"), Number(v.at(1), "floorplan"));
      }
      s.floorplan.push_back(std::move(poly));
    }
    const Json& robot = At(j, "robot", "");
    s.robot.footprint_radius =
        Number(At(robot, "footprint_radius", "robot."), "robot.footprint_radius");
    const Json& half = At(robot, "body_half_extents", "robot.");
    s.robot.body_half_extents = {Number(half.at(0), "robot.body_half_extents"),
                                 Number(half.at(1), "robot.body_half_extents")};
    s.robot.body_height = Number(At(robot, "body_height", "robot."), "robot.body_height");
    s.robot.base_height = Number(At(robot, "base_height", "robot."), "robot.base_height");
    s.robot.home = json_util::PoseFrom(At(robot, "home", "robot."), "robot.home");
    s.crop = AabbFromJson(At(j, "crop", ""), "crop");
    const Json& task = At(j, "task", "");
    if (!task.is_null()) s.task = TaskFromJson(task);
    s.grasp_radius = Number(At(j, "grasp_radius", ""), "grasp_radius");
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::kFormat, std::string("scene: ") + e.what());
  }
  ValidateScene(s);
  return s;
}

void WriteSceneFile(const Scene& scene, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write scene file " + path.string());
  out << SceneToJson(scene) << "\n";
  if (!out) throw Error(ErrorKind::kIo, "failed writing " + path.string());
}

Scene ReadSceneFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open scene file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return SceneFromJson(buf.str());
}

}  // namespace dockaug
