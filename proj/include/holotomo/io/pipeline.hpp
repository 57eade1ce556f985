#pragma once

#include "holotomo/errors.hpp"
#include "holotomo/io/run_config.hpp"

#include <filesystem>
#include <optional>
#include <ostream>

namespace holotomo::io {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNumerical = 4;

struct SweepSpec {
  double z_min = 0.0;
  double z_max = 0.0;
  double z_step = 0.0;
};

// Pipeline stages behind the CLI subcommands. Each writes its artifacts
// under out_dir and reports on `log`; exceptions propagate and are
// mapped to exit codes by run_guarded.
void cmd_simulate(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log);
void cmd_demodulate(const RunConfig& cfg, const std::filesystem::path& input,
                    const std::filesystem::path& out_dir, std::ostream& log);
void cmd_focus(const RunConfig& cfg, const std::filesystem::path& input,
               const std::filesystem::path& out_dir, std::ostream& log);
void cmd_reconstruct(const RunConfig& cfg, const std::filesystem::path& input,
                     bool input_is_field, const std::filesystem::path& out_dir, std::ostream& log);
void cmd_inspect(const RunConfig& cfg, const std::filesystem::path& input,
                 const std::optional<SweepSpec>& sweep, const std::filesystem::path& out_dir,
                 std::ostream& log);
void cmd_export(const std::filesystem::path& input, const std::filesystem::path& out_dir,
                std::ostream& log);

// Runs fn(), mapping ConfigError/DataError/NumericalError to the exit
// codes above and printing the message to err.
template <class Fn>
int run_guarded(std::ostream& err, Fn&& fn) {
  try {
    fn();
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
}

}  // namespace holotomo::io
