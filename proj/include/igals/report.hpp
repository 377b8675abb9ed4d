#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "igals/error_metrics.hpp"

namespace igals {

/// One table cell: run parameters plus the error report of the run.
struct TableCell {
  ProblemParams params;
  ErrorReport error;
  double residual = 0.0;
  double wall_time_s = 0.0;
};

/// Shortest round-trip decimal representation (std::to_chars); locale-free,
/// byte-deterministic.
std::string format_double(double v);
/// Scientific with 3 significant digits (table style, e.g. 9.76e-03).
std::string format_sci3(double v);

/// CSV with header p,ell,k,alpha2,beta2,gamma2,control_space,dof,l2,h1_semi,
/// h2_semi,h2_full,residual,wall_time_s. Error columns are relative errors;
/// unset parameters serialize as empty fields, and wall_time_s stays empty
/// unless with_timing is set (reruns are byte-identical by default).
std::string cells_to_csv(std::span<const TableCell> cells, bool with_timing);

/// Human-readable grid: rows ell, columns alpha2, trailing DoF column.
std::string forward_table_markdown(std::span<const TableCell> cells, std::span<const int> ells,
                                   std::span<const double> alpha2s);

/// Human-readable grid: rows beta2, columns gamma2.
std::string inverse_table_markdown(std::span<const TableCell> cells,
                                   std::span<const double> beta2s,
                                   std::span<const double> gamma2s,
                                   const std::string& control_space);

std::string rates_to_csv(std::span<const int> ells, std::span<const double> errors,
                         std::span<const double> rates);

/// Everything needed to reproduce a run: command, full parameter echo,
/// emitted files, measured per-cell wall times.
struct RunManifest {
  std::string command;
  std::map<std::string, std::string> params;
  std::vector<std::string> outputs;
  std::vector<double> wall_times_s;

  std::string to_json() const;
  static RunManifest from_json_file(const std::string& path);
};

}  // namespace igals
