///
/// \file cli.hpp
///
/// Command-line front end.
///
/// Exit codes: 0 on success, 1 on usage or validation errors, 2 when a
/// solver hits a structurally unsolvable mask.
///
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hankelmc
{

int cli_main(int argc, char** argv);

/// As above with explicit arguments (excluding the program name) and streams.
int cli_main(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err);

} // namespace hankelmc
