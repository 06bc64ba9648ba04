// Copyright 2026 The sofic-extract Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sofic/serialize.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace sofic::serialize {

namespace {

json numbers(const std::vector<double>& xs) {
  json out = json::array();
  for (double x : xs) out.push_back(number(x));
  return out;
}

json indices(const std::vector<std::size_t>& xs) {
  json out = json::array();
  for (auto x : xs) out.push_back(x);
  return out;
}

json pairs(const Group& group, const std::vector<PairValue>& values) {
  json out = json::array();
  for (const auto& v : values) {
    out.push_back({{"g", group.format(v.g)}, {"h", group.format(v.h)}, {"value", number(v.value)}});
  }
  return out;
}

json strings(const std::vector<std::string>& xs) {
  json out = json::array();
  for (const auto& x : xs) out.push_back(x);
  return out;
}

json orthonormalization(const OrthonormalizationResult& r) {
  return {
      {"kept", indices(r.kept)},
      {"dropped", indices(r.dropped)},
      {"excluded", indices(r.excluded)},
      {"rho_requested", number(r.rho_requested)},
      {"rho_measured", number(r.rho_measured)},
      {"rho_used", number(r.rho_used)},
      {"rho_replaced", r.rho_replaced},
      {"s_fraction", number(r.s_fraction)},
      {"deviation_kept", number(r.deviation_kept)},
      {"deviation_full", number(r.deviation_full)},
      {"deviation_bound", number(r.deviation_bound)},
      {"orthogonality_error", number(r.orthogonality_error)},
  };
}

json step_metrics(const Group& group, const StepMetrics& m) {
  return {
      {"h", group.format(m.h)},
      {"corner",
       {{"value", number(m.corner.corner)},
        {"sum_a", number(m.corner.sum_a)},
        {"sum_b", number(m.corner.sum_b)},
        {"sum_c", number(m.corner.sum_c)},
        {"measured_bound", number(m.corner.measured_bound)},
        {"stated_bound", number(m.corner.stated_bound)}}},
      {"theta", number(m.theta)},
      {"beta_defect_sq", number(m.beta_defect_sq)},
      {"displacement", numbers(m.displacement)},
      {"displacement_bound", numbers(m.displacement_bound)},
      {"displacement_stated", numbers(m.displacement_stated)},
      {"condition_term", numbers(m.condition_term)},
      {"mismatch", numbers(m.mismatch)},
      {"mismatch_bound", numbers(m.mismatch_bound)},
      {"gamma_trace", number(m.gamma_trace)},
      {"gamma_trace_bound", number(m.gamma_trace_bound)},
      {"gamma_trace_stated", number(m.gamma_trace_stated)},
      {"beta_trace", number(m.beta_trace)},
      {"beta_trace_bound", number(m.beta_trace_bound)},
      {"beta_trace_stated", number(m.beta_trace_stated)},
      {"gamma_trace_over_y", number(m.gamma_trace_over_y)},
      {"combined_distance", number(m.combined_distance)},
      {"combined_from_parts", number(m.combined_from_parts)},
      {"commute_gamma", number(m.commute_gamma)},
      {"commute_beta", number(m.commute_beta)},
      {"beta_unitarity", number(m.beta_unitarity)},
      {"gamma_structure", number(m.gamma_structure)},
  };
}

}  // namespace

json number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double parse_number(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw std::invalid_argument("not a number: " + j.dump());
}

json elements(const Group& group, const ElementSet& set) {
  json out = json::array();
  for (const auto& g : set) out.push_back(group.format(g));
  return out;
}

json checks(const CheckList& list) {
  json out = json::array();
  for (const auto& c : list.items()) {
    out.push_back({{"name", c.name},
                   {"lhs", number(c.lhs)},
                   {"rhs", number(c.rhs)},
                   {"pass", c.pass},
                   {"asserted", c.asserted},
                   {"skipped", c.skipped},
                   {"note", c.note}});
  }
  return out;
}

json defect_report(const Group& group, const DefectReport& r) {
  return {
      {"test_set", elements(group, r.test_set)},
      {"multiplicativity", pairs(group, r.multiplicativity)},
      {"gaps", pairs(group, r.gaps)},
      {"separation", pairs(group, r.separation)},
      {"separation_margin", numbers(r.separation_margin)},
      {"worst_multiplicativity", number(r.worst_multiplicativity)},
      {"mean_multiplicativity", number(r.mean_multiplicativity)},
      {"worst_margin", number(r.worst_margin)},
      {"mean_margin", number(r.mean_margin)},
      {"epsilon", number(r.epsilon())},
  };
}

json matrix(const Matrix& a, const MatrixOptions& opts) {
  json out = {{"rows", a.rows()}, {"cols", a.cols()}};
  const bool elide = !opts.debug && (a.rows() > opts.elide_above || a.cols() > opts.elide_above);
  out["elided"] = elide;
  if (elide) return out;
  json data = json::array();
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      data.push_back({number(a(i, j).real()), number(a(i, j).imag())});
    }
  }
  out["data"] = std::move(data);
  return out;
}

json sofic(const SoficApproximation& sigma) {
  json perms = json::object();
  for (const auto& [g, p] : sigma.perms()) perms[sigma.group().format(g)] = indices(p);
  return {{"index_size", sigma.index_size()},
          {"support", elements(sigma.group(), sigma.support())},
          {"permutations", std::move(perms)}};
}

json hyperlinear(const HyperlinearApproximation& alpha, const MatrixOptions& opts) {
  json us = json::object();
  for (const auto& [g, u] : alpha.unitaries()) us[alpha.group().format(g)] = matrix(u, opts);
  return {{"dim", alpha.dim()},
          {"support", elements(alpha.group(), alpha.support())},
          {"unitaries", std::move(us)}};
}

json harvest(const VectorHarvest& h) {
  return {
      {"accepted", h.vectors.size()},
      {"max_I", numbers(h.max_I)},
      {"max_II", numbers(h.max_II)},
      {"overlaps", numbers(h.overlaps)},
      {"accepted_attempts", indices(h.accepted_attempts)},
      {"attempts", h.attempts},
      {"rejected_I", h.rejected_I},
      {"rejected_overlap", h.rejected_overlap},
      {"rejected_II", h.rejected_II},
      {"target_trace", number(h.target_trace)},
      {"final_trace", number(h.final_trace)},
      {"complete", h.complete},
      {"reason", h.reason},
      {"hypothesis",
       {{"level", number(h.hypothesis_level)},
        {"multiplicativity", number(h.hypothesis_multiplicativity)},
        {"separation_margin", number(h.hypothesis_separation_margin)},
        {"pairs_checked", h.hypothesis_pairs_checked},
        {"met", h.hypothesis_met}}},
      {"warnings", strings(h.warnings)},
  };
}

json lemma_output(const Group& group, const LemmaOutput& out, const MatrixOptions& opts) {
  json blocks = json::array();
  for (std::size_t j = 0; j < out.family.blocks(); ++j) {
    json b = orthonormalization(out.family.steps[j]);
    b["size"] = out.family.members[j].size();
    b["offset"] = out.family.offsets[j];
    b["block_deviation"] = number(out.family.block_deviation[j]);
    blocks.push_back(std::move(b));
  }
  json per_h = json::array();
  for (const auto& m : out.per_h) per_h.push_back(step_metrics(group, m));
  json j = {
      {"complete", out.complete},
      {"failure", out.failure},
      {"harvest", harvest(out.harvest)},
      {"blocks", std::move(blocks)},
      {"gram_error", number(out.family.gram_error)},
      {"dim_x", out.dim_x},
      {"dim_y", out.dim_y},
      {"dim_z", out.dim_z},
      {"eta", number(out.eta)},
      {"lambda", number(out.lambda)},
      {"kappa", number(out.kappa)},
      {"m_size", out.m_size},
      {"per_h", std::move(per_h)},
      {"checks", checks(out.checks)},
      {"warnings", strings(out.warnings)},
  };
  j["gamma_defect"] = out.gamma_defect ? defect_report(group, *out.gamma_defect) : json(nullptr);
  j["beta_defect"] = out.beta_defect ? defect_report(group, *out.beta_defect) : json(nullptr);
  j["gamma_sofic"] = out.gamma_sofic ? sofic(*out.gamma_sofic) : json(nullptr);
  if (opts.debug) {
    j["zetas"] = matrix(out.family.zetas, opts);
    j["y_basis"] = matrix(out.y_basis, opts);
  }
  return j;
}

json pipeline_output(const Group& group, const PipelineOutput& out, const MatrixOptions& opts) {
  json stages = json::array();
  for (const auto& s : out.stages) {
    json j = lemma_output(group, s.lemma, opts);
    j["stage"] = s.stage;
    j["dim_in"] = s.dim_in;
    j["stage_distance"] = numbers(s.stage_distance);
    stages.push_back(std::move(j));
  }
  json j = {
      {"complete", out.complete},
      {"failure", out.failure},
      {"stages", std::move(stages)},
      {"covered_dim", out.covered_dim},
      {"padding_dim", out.padding_dim},
      {"covered_fraction", number(out.covered_fraction)},
      {"distance", numbers(out.distance)},
      {"distance_bound", numbers(out.distance_bound)},
      {"padding_cost_sq", numbers(out.padding_cost_sq)},
      {"checks", checks(out.checks)},
      {"warnings", strings(out.warnings)},
  };
  j["failed_stage"] = out.failed_stage ? json(*out.failed_stage) : json(nullptr);
  j["omega_sofic_defect"] =
      out.omega_sofic_defect ? defect_report(group, *out.omega_sofic_defect) : json(nullptr);
  j["sofic"] = out.sofic ? sofic(*out.sofic) : json(nullptr);
  if (opts.debug) j["basis"] = matrix(out.basis, opts);
  return j;
}

json schedule(const Group& group, const ParameterSchedule& s) {
  json levels = json::array();
  for (const auto& l : s.levels) {
    json j = {{"index", l.index},
              {"log_eta", number(l.log_eta)},
              {"log_lambda", number(l.log_lambda)},
              {"log_size", number(l.log_size)},
              {"log_radius", number(l.log_radius)},
              {"log_c_lambda", number(l.log_c_lambda)},
              {"overflow", l.overflow}};
    if (s.mode == ScheduleMode::practical) {
      j["radius"] = l.radius;
      j["size"] = l.elements.size();
      j["eta"] = number(l.eta);
      j["lambda"] = number(l.lambda);
    }
    levels.push_back(std::move(j));
  }
  return {
      {"mode", schedule_mode_name(s.mode)},
      {"group", s.group_name},
      {"f", elements(group, s.f)},
      {"epsilon", number(s.epsilon)},
      {"kappa", number(s.kappa)},
      {"kappa_overridden", s.kappa_overridden},
      {"eta_overridden", s.eta_overridden},
      {"stages", s.stages},
      {"required_stages", s.required_stages},
      {"levels", std::move(levels)},
      {"checks", checks(s.checks)},
      {"runnable", s.runnable},
      {"notes", strings(s.notes)},
  };
}

}  // namespace sofic::serialize
