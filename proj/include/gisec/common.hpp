#pragma once
#include <stdexcept>
#include <string>

namespace gisec {

/// Error taxonomy shared by all modules.  The CLI maps these onto its
/// stable exit codes (usage 1, I/O 2, degenerate data 3, infeasible 4).
struct invalid_state_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct corrupted_state_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct degenerate_channel_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct undefined_threshold_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct infeasible_level_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct degenerate_region_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

} // namespace gisec
