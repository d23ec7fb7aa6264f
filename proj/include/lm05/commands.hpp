#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "lm05/engine.hpp"

namespace lm05 {

struct SweepSpec {
  enum class Variable : std::uint8_t { TLink, DistanceKm, Mu };
  enum class Scale : std::uint8_t { Linear, Log };

  Variable variable = Variable::TLink;
  double start = 0.0;
  double stop = 1.0;
  int points = 200;
  Scale scale = Scale::Linear;

  // Validates and materializes the grid (start < stop, points >= 2,
  // log scale needs start > 0). Throws std::invalid_argument.
  std::vector<double> grid() const;
};

struct CommonOptions {
  std::uint64_t seed = 1;
  unsigned threads = 0;  // 0 = hardware concurrency
  bool eta_in_gamma = false;
  bool account_cm = false;
  CascadeTable cascade;
};

// `rate-curve`: security margin of both protocols versus transmissivity.
struct RateCurveParams {
  double mu = 1.0;
  double eta_b = 1.0;
  SweepSpec sweep{SweepSpec::Variable::TLink, 1e-3, 1.0, 200,
                  SweepSpec::Scale::Log};
};
int cmd_rate_curve(const RateCurveParams& params, const CommonOptions& common,
                   std::ostream& csv);

// `gain-distance`: per-distance mu optimization of the secure gain.
struct GainDistanceParams {
  GainDistanceParams();
  LinkParams link;              // 830 nm defaults
  std::vector<double> distances;  // km; defaults to 0.25 .. 8.0 step 0.25
  QberModel qber = QberModel::dark_driven(kDefaultMisalignment);
};
int cmd_gain_distance(const GainDistanceParams& params,
                      const CommonOptions& common, std::ostream& csv);

// `experiment`: tabletop parameter set under both eta accountings.
struct ExperimentParams {
  double mu = 0.118;
  double qber = 0.0248;
  double t_link = 0.27;
  double eta_b = 0.5;
  double d_b = 2.4e-6;
  double rep_rate_hz = 20e6;
  double cm_probability = 0.5;
};
int cmd_experiment(const ExperimentParams& params, const CommonOptions& common,
                   std::ostream& text, std::ostream* csv);

// `simulate`: Monte Carlo session plus analytic cross-check. Returns 2 when
// the observed detection fraction disagrees with the model beyond 5 sigma.
struct SimulateParams {
  SessionConfig cfg;
};
int cmd_simulate(const SimulateParams& params, const CommonOptions& common,
                 std::ostream& text, std::ostream* csv);

bool detection_self_check(double observed, double expected, std::uint64_t n,
                          double k_sigma);

}  // namespace lm05
