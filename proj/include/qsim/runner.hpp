#pragma once

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "qsim/atmosphere.hpp"
#include "qsim/scenario.hpp"

namespace qsim {

enum class Command { pass, downlink, chain, bbm92, balloon, sweep };

Command command_from_string(const std::string& s);
std::string command_to_string(Command c);

// One CSV row. NaN in a numeric field serialises as an empty field (the pass
// command emits geometry-only rows; single-station scenarios leave the B
// columns empty).
inline constexpr double kEmptyField = std::numeric_limits<double>::quiet_NaN();

struct ResultRow {
  double t_s = 0.0;
  double elev_a_deg = kEmptyField;
  double range_a_km = kEmptyField;
  double elev_b_deg = kEmptyField;
  double range_b_km = kEmptyField;
  std::string param;  // station name, chain pair, or swept value
  double rate_mean = kEmptyField;
  double rate_std = kEmptyField;
  double qber = kEmptyField;
};

struct LinkSummary {
  std::string name;
  double max_rate = 0.0;
  double t_at_max = kEmptyField;  // NaN when the link has no time axis
  double qber_at_max = 0.0;
  double key_bits = kEmptyField;  // NaN when not meaningful for the link
};

struct RunSummary {
  std::vector<LinkSummary> links;
  double chain_min = kEmptyField;          // NaN unless a chain was evaluated
  double key_bits = kEmptyField;           // best per-pass key over the links
  double throughput_bits_s = kEmptyField;  // NaN unless the command defines one
  std::vector<std::string> notes;
};

struct RunOutput {
  std::vector<ResultRow> rows;
  RunSummary summary;
};

// Executes one command against a parsed scenario. Deterministic: the same
// scenario and command always produce identical output, including CSV bytes.
RunOutput run_scenario(const Scenario& scenario, Command command,
                       const AtmosphereTable& table);

// Pinned CSV layout:
//   t_s,elev_A_deg,range_A_km,elev_B_deg,range_B_km,param,rate_mean,rate_std,qber
void write_csv(std::ostream& out, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_csv(const std::string& path);

}  // namespace qsim
