#include "dockaug/error.h"

namespace dockaug {

const char* ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig: return "config";
    case ErrorKind::kFormat: return "format";
    case ErrorKind::kInvariant: return "invariant";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kSize: return "size";
    case ErrorKind::kEmptyInput: return "empty_input";
    case ErrorKind::kLabeling: return "labeling";
    case ErrorKind::kNoSkillSegment: return "no_skill_segment";
    case ErrorKind::kEmptyScene: return "empty_scene";
    case ErrorKind::kPlanning: return "planning";
    case ErrorKind::kExhaustion: return "exhaustion";
    case ErrorKind::kGeneration: return "generation";
  }
  return "unknown";
}

}  // namespace dockaug
