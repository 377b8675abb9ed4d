#include "igals/report.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "igals/errors.hpp"

namespace igals {

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_sci3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

namespace {

std::string opt_field(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

const TableCell* find_cell(std::span<const TableCell> cells, int ell,
                           const std::optional<double>& a2, const std::optional<double>& b2,
                           const std::optional<double>& g2) {
  for (const TableCell& c : cells) {
    if (c.params.ell == ell && c.params.alpha2 == a2 && c.params.beta2 == b2 &&
        c.params.gamma2 == g2) {
      return &c;
    }
  }
  return nullptr;
}

}  // namespace

std::string cells_to_csv(std::span<const TableCell> cells, bool with_timing) {
  std::ostringstream out;
  out << "p,ell,k,alpha2,beta2,gamma2,control_space,dof,l2,h1_semi,h2_semi,h2_full,residual,"
         "wall_time_s\n";
  for (const TableCell& c : cells) {
    const ProblemParams& p = c.params;
    out << p.p << ',' << p.ell << ',' << p.k << ',' << opt_field(p.alpha2) << ','
        << opt_field(p.beta2) << ',' << opt_field(p.gamma2) << ',' << p.control_space << ','
        << c.error.dof << ',' << format_double(c.error.rel_l2()) << ','
        << format_double(c.error.rel_h1_semi()) << ',' << format_double(c.error.rel_h2_semi())
        << ',' << format_double(c.error.rel_h2_full()) << ',' << format_double(c.residual) << ','
        << (with_timing ? format_double(c.wall_time_s) : std::string()) << '\n';
  }
  return out.str();
}

std::string forward_table_markdown(std::span<const TableCell> cells, std::span<const int> ells,
                                   std::span<const double> alpha2s) {
  std::ostringstream out;
  out << "| l \\ alpha^2 |";
  for (double a2 : alpha2s) out << ' ' << format_double(a2) << " |";
  out << " DoF |\n|---|";
  for (size_t i = 0; i < alpha2s.size(); ++i) out << "---|";
  out << "---|\n";
  for (int ell : ells) {
    out << "| " << ell << " |";
    int dof = 0;
    for (double a2 : alpha2s) {
      const TableCell* c = find_cell(cells, ell, a2, std::nullopt, std::nullopt);
      out << ' ' << (c ? format_sci3(c->error.rel_h2_full()) : std::string("-")) << " |";
      if (c) dof = c->error.dof;
    }
    out << ' ' << dof << " |\n";
  }
  return out.str();
}

std::string inverse_table_markdown(std::span<const TableCell> cells,
                                   std::span<const double> beta2s,
                                   std::span<const double> gamma2s,
                                   const std::string& control_space) {
  std::ostringstream out;
  out << "control space: " << control_space << "\n\n| beta^2 \\ gamma^2 |";
  for (double g2 : gamma2s) out << ' ' << format_double(g2) << " |";
  out << "\n|---|";
  for (size_t i = 0; i < gamma2s.size(); ++i) out << "---|";
  out << '\n';
  for (double b2 : beta2s) {
    out << "| " << format_double(b2) << " |";
    for (double g2 : gamma2s) {
      const TableCell* c = nullptr;
      for (const TableCell& cand : cells) {
        if (cand.params.beta2 == b2 && cand.params.gamma2 == g2 &&
            cand.params.control_space == control_space) {
          c = &cand;
          break;
        }
      }
      out << ' ' << (c ? format_sci3(c->error.rel_h2_full()) : std::string("-")) << " |";
    }
    out << '\n';
  }
  return out.str();
}

std::string rates_to_csv(std::span<const int> ells, std::span<const double> errors,
                         std::span<const double> rates) {
  std::ostringstream out;
  out << "ell,error,rate_to_next\n";
  for (size_t i = 0; i < errors.size(); ++i) {
    out << (i < ells.size() ? std::to_string(ells[i]) : std::string()) << ','
        << format_double(errors[i]) << ','
        << (i < rates.size() ? format_double(rates[i]) : std::string()) << '\n';
  }
  return out.str();
}

std::string RunManifest::to_json() const {
  nlohmann::json j;
  j["command"] = command;
  j["params"] = params;
  j["outputs"] = outputs;
  j["wall_times_s"] = wall_times_s;
  return j.dump(2) + "\n";
}

RunManifest RunManifest::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(Errc::kDegenerateInput, "cannot open manifest: " + path);
  }
  nlohmann::json j;
  in >> j;
  RunManifest m;
  m.command = j.at("command").get<std::string>();
  m.params = j.at("params").get<std::map<std::string, std::string>>();
  if (j.contains("outputs")) m.outputs = j["outputs"].get<std::vector<std::string>>();
  if (j.contains("wall_times_s")) m.wall_times_s = j["wall_times_s"].get<std::vector<double>>();
  return m;
}

}  // namespace igals
