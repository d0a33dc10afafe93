#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace qgfv::cli {

enum ExitCode : int {
  kOk = 0,
  kValidationFailed = 1,
  kIoError = 2,
  kBadArguments = 3,
  kSolverFailure = 4,
};

/// Full command line without the program name, e.g. {"mesh", "validate", "m.qgmesh"}.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int main(int argc, char** argv);

int cmd_mesh_gen_quad(int nx, int ny, double Lx, double Ly, const std::filesystem::path& out_file);
int cmd_mesh_gen_cvt(const std::filesystem::path& polygon_file, int n, int iters, std::uint64_t seed,
                     const std::filesystem::path& out_file);
int cmd_mesh_validate(const std::filesystem::path& mesh_file, bool cvt_tolerances, std::ostream& out);
int cmd_run(const std::filesystem::path& config_file, const std::filesystem::path& out_dir);
int cmd_steady(const std::filesystem::path& config_file, const std::filesystem::path& out_dir);

/// Writes `text` to a sibling temporary file and renames it into place.
void write_file_atomically(const std::filesystem::path& path, const std::string& text);

}  // namespace qgfv::cli
