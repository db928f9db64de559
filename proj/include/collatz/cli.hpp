#ifndef COLLATZ_CLI_HPP
#define COLLATZ_CLI_HPP

#include <iosfwd>
#include <span>
#include <string>

namespace collatz::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_domain_error = 1;
inline constexpr int exit_usage_error = 2;

/// Runs one command line. `args` excludes the program name. Results go to
/// `out`, diagnostics to `err`.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace collatz::cli

#endif  // COLLATZ_CLI_HPP
