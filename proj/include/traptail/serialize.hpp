#pragma once

// JSON forms of the summary types.

#include "traptail/asympt.hpp"
#include "traptail/json_out.hpp"
#include "traptail/sim.hpp"

namespace traptail {

inline Json to_json(const Estimate& e) {
  Json j = Json::object();
  j.set("value", e.value).set("se", e.se).set("count", e.count);
  return j;
}

inline Json to_json(const TrapStats& t) {
  Json j = Json::object();
  j.set("k", t.k < 0 ? Json() : Json(t.k)).set("n", t.n).set("n_reached", t.n_reached);
  j.set("p_reach", to_json(t.p_reach)).set("mean_T", to_json(t.mean_T));
  j.set("mean_N_given_A", to_json(t.mean_N_given_A));
  j.set("mean_T_in_given_A", to_json(t.mean_T_in_given_A));
  j.set("mean_T_exc_given_A", to_json(t.mean_T_exc_given_A));
  j.set("mean_T_out_given_A", to_json(t.mean_T_out_given_A));
  j.set("excursion_length_mean", to_json(t.excursion_length_mean));
  j.set("excursion_length_variance", to_json(t.excursion_length_variance));
  return j;
}

inline Json to_json(const StatsRecord& r) {
  Json per_k = Json::array();
  for (const auto& t : r.per_k) per_k.push(to_json(t));
  Json j = Json::object();
  j.set("schema", 1).set("n_samples", r.n_samples).set("pooled", to_json(r.pooled)).set("per_k", per_k);
  j.set("mixture_mean_N_given_A", to_json(r.mixture_mean_N_given_A));
  return j;
}

inline Json to_json(const OscillationSpectrum& s) {
  Json modes = Json::array();
  for (const auto& m : s.modes) {
    Json j = Json::object();
    j.set("k", m.k).set("c", m.c).set("d", m.d).set("chi_re", m.chi.real()).set("chi_im", m.chi.imag());
    modes.push(j);
  }
  Json j = Json::object();
  j.set("rho", s.rho).set("prefactor", s.prefactor).set("modes", modes);
  return j;
}

}  // namespace traptail
