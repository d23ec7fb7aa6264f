#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "lm05/commands.hpp"
#include "lm05/config.hpp"

namespace {

using namespace lm05;

Protocol parse_protocol(const std::string& s) {
  if (s == "lm05") return Protocol::LM05;
  if (s == "bb84") return Protocol::BB84;
  throw std::invalid_argument("unknown protocol: " + s);
}

EveKind parse_eve(const std::string& s) {
  if (s == "none") return EveKind::None;
  if (s == "pns-m") return EveKind::PnsM;
  if (s == "pns-m-prime") return EveKind::PnsMPrime;
  throw std::invalid_argument("unknown eavesdropper strategy: " + s);
}

BlockPlacement parse_placement(const std::string& s) {
  if (s == "forward") return BlockPlacement::ForwardOnly;
  if (s == "both") return BlockPlacement::SplitBothPaths;
  throw std::invalid_argument("unknown blocking placement: " + s);
}

SweepSpec::Scale parse_scale(const std::string& s) {
  if (s == "linear") return SweepSpec::Scale::Linear;
  if (s == "log") return SweepSpec::Scale::Log;
  throw std::invalid_argument("unknown sweep scale: " + s);
}

int dispatch(int argc, char** argv) {
  CLI::App app{"Secure-bit gain calculator and Monte Carlo simulator for the "
               "LM05 two-way QKD protocol and BB84 under photon-number-"
               "splitting attacks"};
  app.require_subcommand(1);
  app.fallthrough();

  std::uint64_t seed = 1;
  unsigned threads = 0;
  bool eta_in_gamma = false;
  bool account_cm = false;
  std::string config_path, out_path, cascade_path;
  auto* o_seed = app.add_option("--seed", seed, "RNG seed (default 1)");
  auto* o_threads =
      app.add_option("--threads", threads, "worker threads, 0 = hardware");
  auto* o_eta = app.add_flag("--eta-in-gamma", eta_in_gamma,
                             "treat eta_B as already folded into t_link/Gamma_c");
  auto* o_acm = app.add_flag("--account-cm", account_cm,
                             "charge lm05 throughput for the control-mode share");
  app.add_option("--config", config_path, "flat key=value configuration file");
  app.add_option("--out", out_path, "write the CSV report to this path");
  auto* o_casc = app.add_option("--cascade-table", cascade_path,
                                "two-column QBER/efficiency anchor file");

  // rate-curve -------------------------------------------------------------
  auto* rate = app.add_subcommand(
      "rate-curve", "security margin of both protocols versus transmissivity");
  RateCurveParams rate_params;
  std::string rate_scale = "log";
  auto* r_mu = rate->add_option("--mu", rate_params.mu, "mean photons/pulse");
  auto* r_eta = rate->add_option("--eta-b", rate_params.eta_b, "detector efficiency");
  auto* r_start = rate->add_option("--start", rate_params.sweep.start, "first t_link");
  auto* r_stop = rate->add_option("--stop", rate_params.sweep.stop, "last t_link");
  auto* r_points = rate->add_option("--points", rate_params.sweep.points, "grid size");
  auto* r_scale = rate->add_option("--scale", rate_scale, "linear|log");

  // gain-distance ----------------------------------------------------------
  auto* gd = app.add_subcommand(
      "gain-distance", "mu-optimized secure gain versus Alice-Bob distance");
  GainDistanceParams gd_params;
  std::vector<double> gd_distances;
  double gd_e_det = kDefaultMisalignment;
  double gd_const_qber = -1.0;
  auto* g_dist = gd->add_option("--distances", gd_distances,
                                "comma-separated distances in km")
                     ->delimiter(',');
  auto* g_alpha = gd->add_option("--alpha", gd_params.link.alpha, "dB/km");
  auto* g_gamma = gd->add_option("--gamma-c", gd_params.link.gamma_c_db, "dB");
  auto* g_eta = gd->add_option("--eta-b", gd_params.link.eta_b, "detector efficiency");
  auto* g_db = gd->add_option("--d-b", gd_params.link.d_b, "dark counts per window");
  auto* g_edet = gd->add_option("--e-det", gd_e_det, "misalignment QBER floor");
  auto* g_const = gd->add_option("--qber-const", gd_const_qber,
                                 "use a constant QBER instead of the dark-count model");

  // experiment -------------------------------------------------------------
  auto* ex = app.add_subcommand(
      "experiment", "gain and key rates for a measured parameter set, "
                    "under both eta accountings");
  ExperimentParams ex_params;
  auto* e_mu = ex->add_option("--mu", ex_params.mu, "mean photons/pulse");
  auto* e_qber = ex->add_option("--qber", ex_params.qber, "measured QBER");
  auto* e_t = ex->add_option("--t-link", ex_params.t_link, "measured transmissivity");
  auto* e_eta = ex->add_option("--eta-b", ex_params.eta_b, "detector efficiency");
  auto* e_db = ex->add_option("--d-b", ex_params.d_b, "dark counts per window");
  auto* e_rep = ex->add_option("--rep-rate", ex_params.rep_rate_hz, "pulses/s");
  auto* e_cm = ex->add_option("--cm-prob", ex_params.cm_probability,
                              "control-mode probability");

  // simulate ---------------------------------------------------------------
  auto* sim = app.add_subcommand("simulate",
                                 "Monte Carlo session with analytic cross-check");
  SimulateParams sim_params;
  sim_params.cfg.n_pulses = 100000;
  std::string sim_protocol = "lm05", sim_eve = "none", sim_split = "forward";
  double sim_alice_eta = -1.0, sim_alice_db = -1.0;
  auto* s_proto = sim->add_option("--protocol", sim_protocol, "lm05|bb84");
  auto* s_pulses = sim->add_option("--pulses", sim_params.cfg.n_pulses, "pulse count");
  auto* s_mu = sim->add_option("--mu", sim_params.cfg.link.mu, "mean photons/pulse");
  auto* s_alpha = sim->add_option("--alpha", sim_params.cfg.link.alpha, "dB/km");
  auto* s_len = sim->add_option("--length", sim_params.cfg.link.length_km, "km");
  auto* s_gamma = sim->add_option("--gamma-c", sim_params.cfg.link.gamma_c_db, "dB");
  auto* s_eta = sim->add_option("--eta-b", sim_params.cfg.link.eta_b, "detector efficiency");
  auto* s_db = sim->add_option("--d-b", sim_params.cfg.link.d_b, "dark counts per window");
  auto* s_cm = sim->add_option("--cm-prob", sim_params.cfg.link.cm_probability,
                               "control-mode probability");
  auto* s_rep = sim->add_option("--rep-rate", sim_params.cfg.link.rep_rate_hz, "pulses/s");
  auto* s_eve = sim->add_option("--eve", sim_eve, "none|pns-m|pns-m-prime");
  auto* s_place = sim->add_option("--eve-split", sim_split,
                                  "blocking placement: forward|both");
  auto* s_back = sim->add_option("--eve-back-fraction",
                                 sim_params.cfg.strategy.backward_block_fraction,
                                 "return-leg share of Eve's blocking");
  auto* s_gsplit = sim->add_option("--gamma-split", sim_params.cfg.gamma_split,
                                   "forward-path share of Gamma_c");
  auto* s_aeta = sim->add_option("--alice-eta", sim_alice_eta,
                                 "control-mode detector efficiency (default: Bob's)");
  auto* s_adb = sim->add_option("--alice-d-b", sim_alice_db,
                                "control-mode dark counts (default: Bob's)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  // Config file fills everything the command line left untouched.
  ConfigFile cf;
  if (!config_path.empty()) cf = ConfigFile::load(config_path);
  cf.fill("seed", o_seed->count() > 0, seed);
  cf.fill("threads", o_threads->count() > 0, threads);
  cf.fill("eta_in_gamma", o_eta->count() > 0, eta_in_gamma);
  cf.fill("account_cm", o_acm->count() > 0, account_cm);
  cf.fill("cascade_table", o_casc->count() > 0, cascade_path);

  CommonOptions common;
  common.seed = seed;
  common.threads = threads;
  common.eta_in_gamma = eta_in_gamma;
  common.account_cm = account_cm;
  if (!cascade_path.empty()) common.cascade = CascadeTable::from_file(cascade_path);

  std::optional<std::ofstream> out_file;
  if (!out_path.empty()) {
    out_file.emplace(out_path, std::ios::binary);
    if (!*out_file) {
      std::cerr << "error: cannot open output file " << out_path << "\n";
      return 1;
    }
  }

  if (rate->parsed()) {
    cf.fill("mu", r_mu->count() > 0, rate_params.mu);
    cf.fill("eta_b", r_eta->count() > 0, rate_params.eta_b);
    cf.fill("start", r_start->count() > 0, rate_params.sweep.start);
    cf.fill("stop", r_stop->count() > 0, rate_params.sweep.stop);
    std::uint64_t pts = rate_params.sweep.points;
    cf.fill("points", r_points->count() > 0, pts);
    rate_params.sweep.points = static_cast<int>(pts);
    cf.fill("scale", r_scale->count() > 0, rate_scale);
    rate_params.sweep.scale = parse_scale(rate_scale);
    return cmd_rate_curve(rate_params, common, out_file ? *out_file : std::cout);
  }

  if (gd->parsed()) {
    cf.fill("alpha", g_alpha->count() > 0, gd_params.link.alpha);
    cf.fill("gamma_c_db", g_gamma->count() > 0, gd_params.link.gamma_c_db);
    cf.fill("eta_b", g_eta->count() > 0, gd_params.link.eta_b);
    cf.fill("d_b", g_db->count() > 0, gd_params.link.d_b);
    cf.fill("e_det", g_edet->count() > 0, gd_e_det);
    cf.fill("qber_const", g_const->count() > 0, gd_const_qber);
    if (g_dist->count() > 0) gd_params.distances = gd_distances;
    gd_params.qber = gd_const_qber >= 0.0 ? QberModel::constant(gd_const_qber)
                                          : QberModel::dark_driven(gd_e_det);
    return cmd_gain_distance(gd_params, common, out_file ? *out_file : std::cout);
  }

  if (ex->parsed()) {
    cf.fill("mu", e_mu->count() > 0, ex_params.mu);
    cf.fill("qber", e_qber->count() > 0, ex_params.qber);
    cf.fill("t_link", e_t->count() > 0, ex_params.t_link);
    cf.fill("eta_b", e_eta->count() > 0, ex_params.eta_b);
    cf.fill("d_b", e_db->count() > 0, ex_params.d_b);
    cf.fill("rep_rate_hz", e_rep->count() > 0, ex_params.rep_rate_hz);
    cf.fill("cm_probability", e_cm->count() > 0, ex_params.cm_probability);
    return cmd_experiment(ex_params, common, std::cout,
                          out_file ? &*out_file : nullptr);
  }

  // simulate
  cf.fill("protocol", s_proto->count() > 0, sim_protocol);
  cf.fill("pulses", s_pulses->count() > 0, sim_params.cfg.n_pulses);
  cf.fill("mu", s_mu->count() > 0, sim_params.cfg.link.mu);
  cf.fill("alpha", s_alpha->count() > 0, sim_params.cfg.link.alpha);
  cf.fill("length_km", s_len->count() > 0, sim_params.cfg.link.length_km);
  cf.fill("gamma_c_db", s_gamma->count() > 0, sim_params.cfg.link.gamma_c_db);
  cf.fill("eta_b", s_eta->count() > 0, sim_params.cfg.link.eta_b);
  cf.fill("d_b", s_db->count() > 0, sim_params.cfg.link.d_b);
  cf.fill("cm_probability", s_cm->count() > 0, sim_params.cfg.link.cm_probability);
  cf.fill("rep_rate_hz", s_rep->count() > 0, sim_params.cfg.link.rep_rate_hz);
  cf.fill("eve", s_eve->count() > 0, sim_eve);
  cf.fill("eve_split", s_place->count() > 0, sim_split);
  cf.fill("eve_back_fraction", s_back->count() > 0,
          sim_params.cfg.strategy.backward_block_fraction);
  cf.fill("gamma_split", s_gsplit->count() > 0, sim_params.cfg.gamma_split);
  cf.fill("alice_eta", s_aeta->count() > 0, sim_alice_eta);
  cf.fill("alice_d_b", s_adb->count() > 0, sim_alice_db);
  sim_params.cfg.protocol = parse_protocol(sim_protocol);
  sim_params.cfg.strategy.kind = parse_eve(sim_eve);
  sim_params.cfg.strategy.placement = parse_placement(sim_split);
  if (sim_alice_eta >= 0.0) sim_params.cfg.alice_eta = sim_alice_eta;
  if (sim_alice_db >= 0.0) sim_params.cfg.alice_d_b = sim_alice_db;
  return cmd_simulate(sim_params, common, std::cout,
                      out_file ? &*out_file : nullptr);
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
