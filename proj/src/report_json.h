#ifndef DOCKAUG_SRC_REPORT_JSON_H_
#define DOCKAUG_SRC_REPORT_JSON_H_

#include <vector>

#include "dockaug/dock_sampler.h"
#include "dockaug/trajectory_parser.h"
#include "json_util.h"

namespace dockaug::json_util {

Json ToJson(const FeasibilityReport& report);
Json ToJson(const SampleResult& result);
Json ToJson(const std::vector<Segment>& segments);

}  // namespace dockaug::json_util

#endif  // DOCKAUG_SRC_REPORT_JSON_H_
