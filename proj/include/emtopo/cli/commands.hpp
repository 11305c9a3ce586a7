#pragma once

#include <iosfwd>

#include "emtopo/cli/config.hpp"

namespace emtopo::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitFlagged = 2;

int cmd_classify(const JobConfig& c, std::ostream& out);
int cmd_bands(const JobConfig& c, std::ostream& out);
int cmd_chern(const JobConfig& c, std::ostream& out);
int cmd_evolve(const JobConfig& c, std::ostream& out);
int cmd_check(const JobConfig& c, std::ostream& out);
/// Writes a built-in fixture as a weight file.
int cmd_fixture(const std::string& name, const std::string& path, std::ostream& out);

}  // namespace emtopo::cli
