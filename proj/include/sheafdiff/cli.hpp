#pragma once

#include <iosfwd>

namespace sheafdiff {

/// Entry point of the `sheafdiff` tool: generate | spectrum | diffuse |
/// experiment | uav-demo. Returns the process exit code.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sheafdiff
