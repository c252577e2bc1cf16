#ifndef DOCKAUG_CLI_H_
#define DOCKAUG_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

#include "dockaug/error.h"

namespace dockaug {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitExhaustion = 4;
inline constexpr int kExitVerification = 5;

int ExitCodeFor(ErrorKind kind);

// Runs the command line `args` (without the program name). Reports go to
// `out`, diagnostics to `err`.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace dockaug

#endif  // DOCKAUG_CLI_H_
