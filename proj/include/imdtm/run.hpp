#pragma once

// Drives one experiment from a RunConfig and writes the diagnostics CSV.
//
// CSV columns: step,t,analytic_err,constraint_err,wall_ms
// constraint_err is left empty when it is not measured (H_stored < 2, or rk4).
// wall_ms is elapsed time since the run started.

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <memory>
#include <ostream>
#include <string>

#include "imdtm/baseline.hpp"
#include "imdtm/config.hpp"
#include "imdtm/diagnostics.hpp"
#include "imdtm/equations.hpp"
#include "imdtm/evolver.hpp"
#include "imdtm/parallel.hpp"

namespace imdtm {

enum ExitStatus : int { kCompleted = 0, kOutputError = 1, kDiverged = 2 };

inline constexpr const char* kCsvHeader = "step,t,analytic_err,constraint_err,wall_ms";

inline std::string csv_row(const DiagnosticsRecord& r) {
  std::string row = std::to_string(r.step) + ',' + format_double(r.t) + ',' + format_double(r.analytic_err) + ',';
  if (!std::isnan(r.constraint_err)) row += format_double(r.constraint_err);
  return row + ',' + format_double(r.wall_ms);
}

/// Diverged: a non-finite state or an analytic error above 100 %.
inline bool diverged(bool finite, double analytic_err) { return !finite || !(analytic_err <= 0.0); }

struct RunResult {
  int status = kCompleted;
  int steps_taken = 0;
  int divergence_step = -1;
  DiagnosticsRecord last;
};

inline RunResult run(const RunConfig& config, std::ostream* log = nullptr, int threads = threads_from_env()) {
  RunResult result;
  std::ofstream csv(config.output_path);
  if (!csv) {
    if (log) *log << "cannot open output file '" << config.output_path << "'\n";
    result.status = kOutputError;
    return result;
  }
  csv << kCsvHeader << '\n';

  const auto system = make_system(config.equation, config.length, config.a_param.value_or(0.0));
  const auto start = std::chrono::steady_clock::now();
  const auto elapsed_ms = [&] {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  };

  // Both schemes are driven through the same three callbacks.
  std::function<bool()> advance;
  std::function<DiagnosticsRecord(int)> measure;
  std::unique_ptr<Evolver> evolver;
  std::unique_ptr<MolOperator> mol;
  MolState state;

  if (config.scheme == Scheme::imdtm) {
    evolver = std::make_unique<Evolver>(*system, config.evolver(threads),
                                        initial_grid(*system, config.n, config.length, config.stored_orders));
    advance = [&] { return evolver->advance(); };
    measure = [&](int) { return evolver->diagnostics(); };
  } else {
    const double dx = config.length / config.n;
    mol = make_mol(*system, config.rk4_accuracy, dx);
    state = initial_mol_state(*system, config.n, config.length);
    advance = [&] {
      state = rk4_step(state, *mol, config.dt);
      return state.all_finite();
    };
    measure = [&](int s) {
      DiagnosticsRecord r;
      r.step = s;
      r.t = s * config.dt;
      r.analytic_err = mol_analytic_error(state, *system, r.t);
      return r;
    };
  }

  const auto emit = [&](DiagnosticsRecord r) {
    r.wall_ms = elapsed_ms();
    csv << csv_row(r) << '\n';
    csv.flush();
    result.last = r;
  };

  emit(measure(0));
  for (int s = 1; s <= config.steps; ++s) {
    const bool finite = advance();
    result.steps_taken = s;
    const bool due = s % config.record_every == 0 || s == config.steps;
    DiagnosticsRecord r = measure(s);
    if (diverged(finite, r.analytic_err)) {
      emit(r);
      result.status = kDiverged;
      result.divergence_step = s;
      if (log) *log << "diverged at step " << s << " (t = " << format_double(r.t) << ")\n";
      return result;
    }
    if (due) emit(r);
  }
  if (!csv) {
    if (log) *log << "failed writing '" << config.output_path << "'\n";
    result.status = kOutputError;
  }
  return result;
}

}  // namespace imdtm
