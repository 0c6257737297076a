#pragma once

#include <iosfwd>
#include <string>

#include "drs/harmonic.hpp"
#include "drs/moves.hpp"

namespace drs {

/// Loads the quad-graph JSON format:
/// { "vertices": [{"id": 0, "graph": "G"}, ...],
///   "quads": [[x, y, x2, y2], ...],
///   "rho": [{"edge": [a, b], "value": 1.5}, ...] }
/// Validates colouring, duality rho(e*) = 1/rho(e) (1e-12) and manifoldness.
DoubleComplex load_complex_json(const std::string& text);
DoubleComplex load_complex_file(const std::string& path);

std::string save_complex_json(const DoubleComplex& dc);

/// Period report: gram, pi (re/im), graph/dual/diamond matrices, residuals.
std::string periods_report_json(const PeriodData& pd);

/// Move script: [{"kind": "I"|"II"|"III", "site": v, ...}, ...]. Sites refer
/// to vertex indices in the complex at the time each move applies.
/// Inverse entries use kind "I-"/"II-" with their parameters.
struct MoveScriptEntry {
  std::string kind;  // "I", "II", "III", "I-", "II-"
  int site = -1;     // summit / middle / centre
  int edge = -1;     // I-: edge to fold over
  int quad = -1;     // II-: quad to split
  int axis = 0;
  double rho = 1.0;  // I-: loop rho; II-: first conductance
};
std::vector<MoveScriptEntry> load_move_script(const std::string& text);

struct MoveReport {
  MarkedSurface final_surface;
  std::vector<double> curvature_trace;
  std::vector<int> holo_dim_trace;
  int failed_index = -1;  // script entry that failed, -1 if none
  std::string failure;
};
MoveReport run_move_script(const MarkedSurface& start,
                           const std::vector<MoveScriptEntry>& script,
                           bool trace_dimension);
std::string move_report_json(const MoveReport& rep);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

/// Fixed %.12e formatting used by all emitters.
std::string fmt_double(double x);

}  // namespace drs
