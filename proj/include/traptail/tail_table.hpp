#pragma once

// A grid of (t, P[T > t]) values together with where they came from.
//
// CSV form, one row per grid point, 17 significant digits:
//   t,survival,provenance,bound
// `bound` is the truncation bound (exact), the 95% half-width (simulated) or
// the mode-truncation bound (asymptotic).

#include <cmath>
#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "traptail/errors.hpp"

namespace traptail {

enum class Provenance { Exact, Simulated, Asymptotic };

inline const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::Exact: return "exact";
    case Provenance::Simulated: return "simulated";
    case Provenance::Asymptotic: return "asymptotic";
  }
  return "?";
}

inline Provenance parse_provenance(const std::string& s) {
  if (s == "exact") return Provenance::Exact;
  if (s == "simulated") return Provenance::Simulated;
  if (s == "asymptotic") return Provenance::Asymptotic;
  throw DomainError("unknown provenance '" + s + "'");
}

struct TailTable {
  std::vector<double> t_grid;
  std::vector<double> survival;
  Provenance provenance = Provenance::Exact;
  std::optional<std::vector<double>> ci_halfwidth;       // Simulated
  std::optional<double> truncation_bound;                // Exact
  std::optional<std::vector<double>> asymptotic_bound;   // Asymptotic

  std::size_t size() const noexcept { return t_grid.size(); }

  double bound_at(std::size_t i) const {
    switch (provenance) {
      case Provenance::Exact: return truncation_bound.value_or(0.0);
      case Provenance::Simulated: return ci_halfwidth ? (*ci_halfwidth)[i] : 0.0;
      case Provenance::Asymptotic: return asymptotic_bound ? (*asymptotic_bound)[i] : 0.0;
    }
    return 0.0;
  }
};

// Checks the table invariants. Asymptotic tables are an expansion, not a
// probability, so only finiteness and non-negativity are enforced for them.
inline void validate(const TailTable& table) {
  if (table.t_grid.size() != table.survival.size()) throw DomainError("tail table: column length mismatch");
  for (std::size_t i = 1; i < table.t_grid.size(); ++i) {
    if (!(table.t_grid[i] > table.t_grid[i - 1])) throw DomainError("tail table: t_grid must be ascending");
  }
  const bool probability = table.provenance != Provenance::Asymptotic;
  for (std::size_t i = 0; i < table.survival.size(); ++i) {
    const double s = table.survival[i];
    if (!std::isfinite(s) || s < 0.0) throw DomainError("tail table: survival must be finite and >= 0");
    if (probability && s > 1.0) throw DomainError("tail table: survival exceeds 1");
    if (probability && i > 0 && s > table.survival[i - 1]) {
      throw DomainError("tail table: survival must be nonincreasing");
    }
  }
  if (table.provenance == Provenance::Simulated) {
    if (!table.ci_halfwidth || table.ci_halfwidth->size() != table.size()) {
      throw DomainError("tail table: simulated tables need a half-width per point");
    }
    for (double h : *table.ci_halfwidth) {
      if (!(h > 0.0)) throw DomainError("tail table: confidence half-widths must be positive");
    }
  }
}

inline std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void write_csv(std::ostream& os, const TailTable& table) {
  os << "t,survival,provenance,bound\n";
  for (std::size_t i = 0; i < table.size(); ++i) {
    os << format_g17(table.t_grid[i]) << ',' << format_g17(table.survival[i]) << ','
       << to_string(table.provenance) << ',' << format_g17(table.bound_at(i)) << '\n';
  }
}

inline TailTable read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw EmptyInputError("tail csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t,survival,provenance,bound") throw DomainError("tail csv: unexpected header '" + line + "'");
  TailTable table;
  std::vector<double> bounds;
  bool first = true;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string t, s, prov, b;
    if (!std::getline(ss, t, ',') || !std::getline(ss, s, ',') || !std::getline(ss, prov, ',') ||
        !std::getline(ss, b)) {
      throw DomainError("tail csv: malformed row '" + line + "'");
    }
    const Provenance p = parse_provenance(prov);
    if (first) {
      table.provenance = p;
      first = false;
    } else if (p != table.provenance) {
      throw DomainError("tail csv: mixed provenance");
    }
    try {
      table.t_grid.push_back(std::stod(t));
      table.survival.push_back(std::stod(s));
      bounds.push_back(std::stod(b));
    } catch (const std::exception&) {
      throw DomainError("tail csv: malformed number in '" + line + "'");
    }
  }
  if (table.t_grid.empty()) throw EmptyInputError("tail csv: no data rows");
  switch (table.provenance) {
    case Provenance::Exact: table.truncation_bound = bounds.front(); break;
    case Provenance::Simulated: table.ci_halfwidth = std::move(bounds); break;
    case Provenance::Asymptotic: table.asymptotic_bound = std::move(bounds); break;
  }
  validate(table);
  return table;
}

}  // namespace traptail
