#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cclust/csv.hpp"
#include "cclust/density.hpp"
#include "cclust/experiments.hpp"
#include "cclust/kernel.hpp"
#include "cclust/linkage.hpp"
#include "cclust/metrics.hpp"
#include "cclust/parallel.hpp"
#include "cclust/regression.hpp"
#include "cclust/rng.hpp"
#include "cclust/robust.hpp"
#include "cclust/simulate.hpp"
#include "cclust/split.hpp"
#include "cclust/validate.hpp"

using nlohmann::json;
using namespace cclust;

namespace {

void emit_error(bool as_json, const char* type, const std::string& message) {
  if (as_json) {
    json rec{{"error", {{"type", type}, {"message", message}}}};
    std::fprintf(stderr, "%s\n", rec.dump().c_str());
  } else {
    std::fprintf(stderr, "error: %s\n", message.c_str());
  }
}

int resolve_threads(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("CC_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 0;  // library default: hardware concurrency
}

PointSet matrix_rows(const CounterfactualMatrix& m) {
  PointSet out(m.n);
  for (std::size_t i = 0; i < m.n; ++i) {
    const double* r = m.row(i);
    out[i].assign(r, r + m.q);
  }
  return out;
}

std::vector<double> parse_t_grid(const std::string& s) {
  const auto c1 = s.find(':');
  const auto c2 = s.find(':', c1 == std::string::npos ? c1 : c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos) {
    throw validation_error("--t-grid expects a:b:step");
  }
  double a = parse_double(s.substr(0, c1), "t-grid start");
  double b = parse_double(s.substr(c1 + 1, c2 - c1 - 1), "t-grid stop");
  double step = parse_double(s.substr(c2 + 1), "t-grid step");
  if (!(step > 0.0)) throw validation_error("t-grid step must be positive");
  if (b < a) throw validation_error("t-grid stop below start");
  std::vector<double> grid;
  for (std::size_t i = 0;; ++i) {
    double v = a + static_cast<double>(i) * step;
    if (v > b + step * 1e-9) break;
    grid.push_back(v);
  }
  return grid;
}

LinkageKind parse_linkage(const std::string& s) {
  if (s == "single") return LinkageKind::single;
  if (s == "average") return LinkageKind::average;
  if (s == "complete") return LinkageKind::complete;
  throw validation_error("unknown linkage '" + s + "'");
}

void write_json_file(const std::string& path, const json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

std::vector<std::size_t> retained_from_labels(const std::string& path, std::size_t n_rows) {
  ClusterLabeling lab = read_labels_csv(path);
  if (lab.labels.size() != n_rows) {
    throw validation_error("labels file " + path + " does not match the matrix rows");
  }
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < lab.labels.size(); ++i) {
    if (lab.labels[i] != 0) rows.push_back(i);
  }
  return rows;
}

json clustering_report(const LevelSetClustering& cl, double h) {
  std::vector<std::size_t> sizes(static_cast<std::size_t>(cl.labels.k_max), 0);
  for (int lab : cl.labels.labels) {
    if (lab > 0) ++sizes[static_cast<std::size_t>(lab - 1)];
  }
  return json{{"h", h},
              {"t", cl.t},
              {"retained", cl.retained.size()},
              {"clusters", cl.labels.k_max},
              {"cluster_sizes", sizes}};
}

}  // namespace

int main(int argc, char** argv) {
  bool json_errors = false;
  for (int i = 1; i < argc; ++i) {
    if (std::string(argv[i]) == "--json-errors") json_errors = true;
  }

  CLI::App app{"clustering by treatment-effect similarity"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "cap worker threads (0 = all cores, env CC_THREADS)");
  app.add_flag("--json-errors", json_errors, "machine-readable errors on stderr");

  // simulate ------------------------------------------------------------
  auto* sim_cmd = app.add_subcommand("simulate", "generate synthetic effect-profile data");
  std::string sim_variant;
  sim_cmd->add_option("variant", sim_variant, "voronoi or gauss3")
      ->required()
      ->check(CLI::IsMember({"voronoi", "gauss3"}));
  SimConfig sim;
  double sim_sigma = -1.0, sim_beta = -1.0, sim_noise_var = 0.0, sim_outcome_sd = 0.1;
  std::string sim_out, sim_table_out;
  sim_cmd->add_option("--n", sim.n, "sample size");
  sim_cmd->add_option("--seed", sim.seed, "generator seed");
  sim_cmd->add_option("--nu", sim.nu, "background-noise fraction (voronoi)");
  sim_cmd->add_option("--beta", sim_beta, "apply N(0, n^-beta) perturbation");
  sim_cmd->add_option("--noise-variance", sim_noise_var, "explicit perturbation variance");
  sim_cmd->add_option("--sigma", sim_sigma, "component scale (default 0.05 voronoi, 0.2 gauss3)");
  sim_cmd->add_option("--min-center-sep", sim.min_center_sep,
                      "minimum pairwise center distance (voronoi)");
  sim_cmd->add_option("--out", sim_out, "output prefix")->required();
  sim_cmd->add_option("--table-out", sim_table_out, "also emit an observation table CSV");
  sim_cmd->add_option("--outcome-sd", sim_outcome_sd, "outcome noise sd for --table-out");

  // fit -----------------------------------------------------------------
  auto* fit_cmd = app.add_subcommand("fit", "per-arm regressions and projection");
  std::string fit_in, fit_out, fit_method = "knn", fit_param = "levels";
  RegressionHyperparams fit_hyper;
  double fit_fraction = 0.5;
  std::uint64_t fit_seed = 1;
  fit_cmd->add_option("--in", fit_in, "observation table CSV")->required();
  fit_cmd->add_option("--method", fit_method, "knn or nw")
      ->check(CLI::IsMember({"knn", "nw"}));
  fit_cmd->add_option("--k", fit_hyper.k, "neighbor count (0 = per-arm default)");
  fit_cmd->add_option("--bandwidth", fit_hyper.bandwidth, "kernel bandwidth (0 = default)");
  fit_cmd->add_option("--fraction", fit_fraction, "fit-split fraction");
  fit_cmd->add_option("--seed", fit_seed, "split seed");
  fit_cmd->add_option("--parametrization", fit_param, "levels or contrasts")
      ->check(CLI::IsMember({"levels", "contrasts"}));
  fit_cmd->add_option("--out", fit_out, "output prefix")->required();

  // cluster -------------------------------------------------------------
  auto* cluster_cmd = app.add_subcommand("cluster", "cluster projected points");
  cluster_cmd->require_subcommand(1);

  auto* hier_cmd = cluster_cmd->add_subcommand("hier", "linkage-based merge tree");
  std::string hier_in, hier_out, hier_linkage = "average";
  std::size_t hier_k = 1;
  hier_cmd->add_option("--in", hier_in, "matrix CSV")->required();
  hier_cmd->add_option("--linkage", hier_linkage, "single, average, or complete")
      ->check(CLI::IsMember({"single", "average", "complete"}));
  hier_cmd->add_option("--k", hier_k, "cluster count for the emitted labels");
  hier_cmd->add_option("--out", hier_out, "output prefix")->required();

  auto* rob_cmd = cluster_cmd->add_subcommand("robust-hier", "noise-tolerant hierarchy");
  std::string rob_in, rob_out, rob_truth;
  GoodNeighborhoodParams rob_params;
  std::size_t rob_k = 2;
  std::uint64_t rob_seed = 1;
  rob_cmd->add_option("--in", rob_in, "matrix CSV")->required();
  rob_cmd->add_option("--alpha", rob_params.alpha, "adversarial fraction the run must survive");
  rob_cmd->add_option("--nu", rob_params.nu, "background-noise fraction");
  rob_cmd->add_option("--subsample", rob_params.subsample_n, "subsample size");
  rob_cmd->add_option("--t-override", rob_params.t_override,
                      "neighborhood size (0 = derive from alpha, nu)");
  rob_cmd->add_option("--k", rob_k, "cluster count");
  rob_cmd->add_option("--seed", rob_seed, "subsample seed");
  rob_cmd->add_option("--truth", rob_truth, "labels CSV to score against");
  rob_cmd->add_option("--out", rob_out, "output prefix")->required();

  auto* dens_cmd = cluster_cmd->add_subcommand("density", "level-set clustering");
  dens_cmd->set_help_flag("--help", "print help");  // frees -h for the bandwidth
  std::string dens_in, dens_out, dens_grid;
  double dens_h = 0.0, dens_t = 0.0;
  dens_cmd->add_option("--in", dens_in, "matrix CSV")->required();
  dens_cmd->add_option("--h", dens_h, "bandwidth (0 = data-driven default)");
  dens_cmd->add_option("--t", dens_t, "density level");
  dens_cmd->add_option("--t-grid", dens_grid, "sweep levels a:b:step instead of --t");
  dens_cmd->add_option("--out", dens_out, "output prefix")->required();

  // metrics ---------------------------------------------------------------
  auto* met_cmd = app.add_subcommand("metrics", "evaluation measures");
  met_cmd->require_subcommand(1);

  auto* gap_cmd = met_cmd->add_subcommand("prop1-gap", "linkage gap vs error budget");
  std::string gap_s1, gap_s2, gap_s1h, gap_s2h, gap_linkage = "average", gap_out;
  gap_cmd->add_option("--s1", gap_s1, "first reference set CSV")->required();
  gap_cmd->add_option("--s2", gap_s2, "second reference set CSV")->required();
  gap_cmd->add_option("--s1-hat", gap_s1h, "first estimated set CSV")->required();
  gap_cmd->add_option("--s2-hat", gap_s2h, "second estimated set CSV")->required();
  gap_cmd->add_option("--linkage", gap_linkage, "single, average, or complete")
      ->check(CLI::IsMember({"single", "average", "complete"}));
  gap_cmd->add_option("--out", gap_out, "also write the record to this path");

  auto* hd_cmd = met_cmd->add_subcommand("hausdorff", "set distance between matrices");
  std::string hd_a, hd_b, hd_la, hd_lb, hd_out;
  hd_cmd->add_option("--a", hd_a, "first matrix CSV")->required();
  hd_cmd->add_option("--b", hd_b, "second matrix CSV")->required();
  hd_cmd->add_option("--labels-a", hd_la, "keep only rows with nonzero label");
  hd_cmd->add_option("--labels-b", hd_lb, "keep only rows with nonzero label");
  hd_cmd->add_option("--out", hd_out, "also write the record to this path");

  auto* ce_cmd = met_cmd->add_subcommand("class-error", "best-matching label disagreement");
  std::string ce_pred, ce_truth, ce_out;
  ce_cmd->add_option("--pred", ce_pred, "predicted labels CSV")->required();
  ce_cmd->add_option("--truth", ce_truth, "reference labels CSV")->required();
  ce_cmd->add_option("--out", ce_out, "also write the record to this path");

  // experiment ------------------------------------------------------------
  auto* exp_cmd = app.add_subcommand("experiment", "end-to-end trend tables");
  exp_cmd->require_subcommand(1);

  auto* ab_cmd = exp_cmd->add_subcommand("fig2ab", "robust-hierarchy error trends");
  Fig2abConfig ab_cfg;
  std::string ab_out;
  ab_cmd->add_option("--alphas", ab_cfg.alphas, "alpha grid")->delimiter(',');
  ab_cmd->add_option("--nus", ab_cfg.nus, "nu grid")->delimiter(',');
  ab_cmd->add_option("--betas", ab_cfg.betas, "beta grid")->delimiter(',');
  ab_cmd->add_option("--n", ab_cfg.n, "sample size");
  ab_cmd->add_option("--reps", ab_cfg.reps, "replications");
  ab_cmd->add_option("--subsample", ab_cfg.subsample_n, "subsample size");
  ab_cmd->add_option("--k", ab_cfg.target_k, "cluster count");
  ab_cmd->add_option("--seed", ab_cfg.seed, "master seed");
  ab_cmd->add_option("--out", ab_out, "output directory")->required();

  auto* cd_cmd = exp_cmd->add_subcommand("fig2cd", "level-set recovery trends");
  cd_cmd->set_help_flag("--help", "print help");  // frees -h for the bandwidth
  Fig2cdConfig cd_cfg;
  std::string cd_out;
  cd_cmd->add_option("--ts", cd_cfg.ts, "density levels")->delimiter(',');
  cd_cmd->add_option("--h", cd_cfg.h, "bandwidth");
  cd_cmd->add_option("--n-grid", cd_cfg.n_grid, "sample sizes")->delimiter(',');
  cd_cmd->add_option("--betas", cd_cfg.betas, "beta grid")->delimiter(',');
  cd_cmd->add_option("--reps", cd_cfg.reps, "replications");
  cd_cmd->add_option("--seed", cd_cfg.seed, "master seed");
  cd_cmd->add_option("--out", cd_out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    if (code == 0) return 0;
    if (json_errors) emit_error(true, "usage", e.what());
    return 1;
  }

  set_thread_budget(resolve_threads(threads));
  try {
    if (app.got_subcommand(sim_cmd)) {
      sim.variant = sim_variant == "voronoi" ? SimVariant::voronoi10 : SimVariant::gauss3;
      if (sim_sigma > 0.0) {
        if (sim.variant == SimVariant::voronoi10) sim.sigma_voronoi = sim_sigma;
        else sim.sigma_gauss = sim_sigma;
      }
      auto [data, truth_labels] =
          sim.variant == SimVariant::voronoi10 ? gen_voronoi(sim) : gen_gauss3(sim);
      CounterfactualMatrix out_matrix = data;
      const bool perturbed = sim_beta >= 0.0 || sim_noise_var > 0.0;
      if (perturbed) {
        out_matrix = perturb(data, sim_beta >= 0.0 ? sim_beta : 0.0,
                             derive_seed(sim.seed, 1), sim_noise_var);
      }
      write_matrix_csv(sim_out + ".csv", out_matrix, false);
      write_matrix_csv(sim_out + "_truth.csv", out_matrix, true);
      write_labels_csv(sim_out + "_labels.csv", truth_labels);
      json cfg{{"command", "simulate"},
               {"variant", to_string(sim.variant)},
               {"n", sim.n},
               {"seed", sim.seed},
               {"nu", sim.nu},
               {"sigma", sim.variant == SimVariant::voronoi10 ? sim.sigma_voronoi
                                                              : sim.sigma_gauss},
               {"min_center_sep", sim.min_center_sep},
               {"beta", sim_beta >= 0.0 ? json(sim_beta) : json(nullptr)},
               {"noise_variance", sim_noise_var > 0.0 ? json(sim_noise_var) : json(nullptr)},
               {"outputs",
                {{"matrix", sim_out + ".csv"},
                 {"truth", sim_out + "_truth.csv"},
                 {"labels", sim_out + "_labels.csv"}}}};
      if (!sim_table_out.empty()) {
        ObservationTable table =
            make_observation_table(data, sim_outcome_sd, derive_seed(sim.seed, 2));
        write_table_csv(sim_table_out, table);
        cfg["outputs"]["table"] = sim_table_out;
        cfg["outcome_sd"] = sim_outcome_sd;
      }
      write_json_file(sim_out + "_config.json", cfg);
    } else if (app.got_subcommand(fit_cmd)) {
      ObservationTable table = read_table_csv(fit_in);
      require_valid(table);
      SplitPlan split = make_split(table.n(), fit_fraction, fit_seed);
      RegressionMethod method =
          fit_method == "knn" ? RegressionMethod::knn : RegressionMethod::nadaraya_watson;
      Parametrization param =
          fit_param == "levels" ? Parametrization::levels : Parametrization::contrasts;
      std::vector<ArmRegressionModel> models;
      json arms = json::array();
      for (int arm = 1; arm <= table.q; ++arm) {
        models.push_back(fit_arm(table, arm, method, fit_hyper, split));
        const auto& m = models.back();
        arms.push_back({{"arm", arm},
                        {"k", m.k},
                        {"bandwidth", m.bandwidth},
                        {"n_train", m.training_rows.size()}});
      }
      CounterfactualMatrix matrix = project(models, table, split, param);
      write_matrix_csv(fit_out + ".csv", matrix, false);
      write_json_file(fit_out + "_fit.json",
                      json{{"command", "fit"},
                           {"input", fit_in},
                           {"n", table.n()},
                           {"q", table.q},
                           {"d", table.d},
                           {"method", fit_method},
                           {"parametrization", fit_param},
                           {"fraction", fit_fraction},
                           {"seed", fit_seed},
                           {"arms", arms},
                           {"project_rows", split.project_indices},
                           {"outputs", {{"matrix", fit_out + ".csv"}}}});
    } else if (app.got_subcommand(cluster_cmd)) {
      if (cluster_cmd->got_subcommand(hier_cmd)) {
        CounterfactualMatrix matrix = read_matrix_csv(hier_in);
        Dendrogram dendro = agglomerate(matrix, parse_linkage(hier_linkage));
        ClusterLabeling labels = cut(dendro, hier_k);
        write_labels_csv(hier_out + "_labels.csv", labels);
        json merges = json::array();
        for (const auto& m : dendro.merges) {
          merges.push_back(json::array({m.left, m.right, m.height}));
        }
        write_json_file(hier_out + "_dendrogram.json",
                        json{{"n", dendro.n_leaves}, {"merges", merges}});
      } else if (cluster_cmd->got_subcommand(rob_cmd)) {
        CounterfactualMatrix matrix = read_matrix_csv(rob_in);
        auto [hier, labels] = robust_cluster(matrix, rob_params, rob_k, rob_seed);
        write_labels_csv(rob_out + "_labels.csv", labels);
        json report{{"command", "cluster robust-hier"},
                    {"k", rob_k},
                    {"alpha", rob_params.alpha},
                    {"nu", rob_params.nu},
                    {"subsample_n", rob_params.subsample_n},
                    {"seed", rob_seed},
                    {"t", hier.t},
                    {"m", hier.m},
                    {"degenerate", hier.degenerate},
                    {"subsample", hier.subsample},
                    {"subsample_labels", hier.subsample_labels}};
        if (!rob_truth.empty()) {
          ClusterLabeling truth = read_labels_csv(rob_truth);
          report["error_vs_truth"] = pruning_error(labels, truth);
        }
        write_json_file(rob_out + "_report.json", report);
      } else {
        CounterfactualMatrix matrix = read_matrix_csv(dens_in);
        KernelSpec kernel = make_triangular_kernel(matrix.q);
        double h = dens_h > 0.0 ? dens_h : default_bandwidth(matrix);
        json report{{"command", "cluster density"}, {"h", h}};
        if (!dens_grid.empty()) {
          std::vector<double> grid = parse_t_grid(dens_grid);
          std::vector<LevelSetClustering> sweeps = level_sweep(matrix, h, kernel, grid);
          json levels = json::array();
          for (std::size_t i = 0; i < sweeps.size(); ++i) {
            std::string labels_path = dens_out + "_labels_" + std::to_string(i) + ".csv";
            write_labels_csv(labels_path, sweeps[i].labels);
            json entry = clustering_report(sweeps[i], h);
            entry["labels"] = labels_path;
            levels.push_back(entry);
          }
          report["levels"] = levels;
        } else {
          LevelSetClustering cl = level_set_cluster(matrix, h, dens_t, kernel);
          write_labels_csv(dens_out + "_labels.csv", cl.labels);
          report.update(clustering_report(cl, h));
          report["labels"] = dens_out + "_labels.csv";
        }
        write_json_file(dens_out + "_report.json", report);
      }
    } else if (app.got_subcommand(met_cmd)) {
      json record;
      std::string out_path;
      if (met_cmd->got_subcommand(gap_cmd)) {
        PointSet s1 = matrix_rows(read_matrix_csv(gap_s1));
        PointSet s2 = matrix_rows(read_matrix_csv(gap_s2));
        PointSet s1h = matrix_rows(read_matrix_csv(gap_s1h));
        PointSet s2h = matrix_rows(read_matrix_csv(gap_s2h));
        LinkageGap gap = prop1_gap(s1, s2, s1h, s2h, parse_linkage(gap_linkage));
        record = json{{"metric", "prop1-gap"},
                      {"linkage", gap_linkage},
                      {"exact", gap.exact},
                      {"estimated", gap.estimated},
                      {"gap", gap.gap},
                      {"bound", gap.bound},
                      {"within_bound", gap.gap <= gap.bound * (1.0 + 1e-12) + 1e-15}};
        out_path = gap_out;
      } else if (met_cmd->got_subcommand(hd_cmd)) {
        CounterfactualMatrix a = read_matrix_csv(hd_a);
        CounterfactualMatrix b = read_matrix_csv(hd_b);
        if (a.q != b.q) throw validation_error("matrices have different dimensions");
        std::vector<std::size_t> rows_a(a.n), rows_b(b.n);
        for (std::size_t i = 0; i < a.n; ++i) rows_a[i] = i;
        for (std::size_t i = 0; i < b.n; ++i) rows_b[i] = i;
        if (!hd_la.empty()) rows_a = retained_from_labels(hd_la, a.n);
        if (!hd_lb.empty()) rows_b = retained_from_labels(hd_lb, b.n);
        record = json{{"metric", "hausdorff"},
                      {"rows_a", rows_a.size()},
                      {"rows_b", rows_b.size()}};
        if (rows_a.empty() && rows_b.empty()) {
          record["hausdorff"] = 0.0;
          record["both_empty"] = true;
        } else if (rows_a.empty() || rows_b.empty()) {
          record["hausdorff"] = nullptr;
          record["disjoint"] = true;
        } else {
          record["hausdorff"] = hausdorff_rows(a, rows_a, false, b, rows_b, false);
        }
        out_path = hd_out;
      } else {
        ClusterLabeling pred = read_labels_csv(ce_pred);
        ClusterLabeling truth = read_labels_csv(ce_truth);
        record = json{{"metric", "class-error"},
                      {"n", pred.labels.size()},
                      {"k_pred", pred.k_max},
                      {"k_truth", truth.k_max},
                      {"error", classification_error(pred, truth)}};
        out_path = ce_out;
      }
      std::printf("%s\n", record.dump(2).c_str());
      if (!out_path.empty()) write_json_file(out_path, record);
    } else if (app.got_subcommand(exp_cmd)) {
      if (exp_cmd->got_subcommand(ab_cmd)) {
        std::filesystem::create_directories(ab_out);
        std::vector<Fig2abRow> rows = run_fig2ab(ab_cfg);
        write_fig2ab_csv(ab_out + "/trend.csv", rows);
        write_json_file(ab_out + "/config.json", json{{"experiment", "fig2ab"},
                                                      {"alphas", ab_cfg.alphas},
                                                      {"nus", ab_cfg.nus},
                                                      {"betas", ab_cfg.betas},
                                                      {"n", ab_cfg.n},
                                                      {"reps", ab_cfg.reps},
                                                      {"subsample_n", ab_cfg.subsample_n},
                                                      {"target_k", ab_cfg.target_k},
                                                      {"seed", ab_cfg.seed}});
      } else {
        std::filesystem::create_directories(cd_out);
        std::vector<Fig2cdRow> rows = run_fig2cd(cd_cfg);
        write_fig2cd_csv(cd_out + "/trend.csv", rows);
        write_json_file(cd_out + "/config.json", json{{"experiment", "fig2cd"},
                                                      {"ts", cd_cfg.ts},
                                                      {"h", cd_cfg.h},
                                                      {"n_grid", cd_cfg.n_grid},
                                                      {"betas", cd_cfg.betas},
                                                      {"reps", cd_cfg.reps},
                                                      {"seed", cd_cfg.seed}});
      }
    }
  } catch (const validation_error& e) {
    emit_error(json_errors, "validation", e.what());
    return 2;
  } catch (const numeric_error& e) {
    emit_error(json_errors, "numeric", e.what());
    return 3;
  } catch (const std::exception& e) {
    emit_error(json_errors, "internal", e.what());
    return 3;
  }
  return 0;
}
