#include <filesystem>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hortimap/io.hpp"
#include "hortimap/pipeline.hpp"

namespace {

using namespace hortimap;

ExperimentConfig load_config(const std::string& path) {
  if (path.empty()) return ExperimentConfig{};
  return config_from_json(read_text_file(path));
}

void print_summary(const std::vector<ResultRow>& rows) {
  std::cout << std::left << std::setw(16) << "method" << std::setw(8) << "seed" << std::setw(6)
            << "row" << std::setw(10) << "chamfer" << std::setw(10) << "prec" << std::setw(10)
            << "recall" << std::setw(10) << "f1" << std::setw(10) << "vol%" << std::setw(10)
            << "count%" << "\n";
  for (const ResultRow& r : rows) {
    std::cout << std::left << std::setw(16) << r.method << std::setw(8) << r.seed << std::setw(6)
              << r.row_id;
    if (!r.metrics.defined) {
      std::cout << "(no ground-truth fruit; metrics undefined)\n";
      continue;
    }
    std::cout << std::setw(10) << std::setprecision(4) << r.metrics.chamfer << std::setw(10)
              << r.metrics.precision << std::setw(10) << r.metrics.recall << std::setw(10)
              << r.metrics.f1 << std::setw(10) << r.metrics.volume_accuracy_pct << std::setw(10)
              << r.metrics.count_accuracy_pct << "\n";
  }
}

int cmd_generate_scene(const std::string& config_path, std::uint64_t seed,
                       const std::string& out_path, const std::string& cloud_path,
                       double density) {
  ExperimentConfig cfg = load_config(config_path);
  cfg.scene.rng_seed = seed;
  const Scene scene = generate_scene(cfg.scene);
  save_scene(scene, out_path);
  std::cout << "wrote " << out_path << " (" << scene.primitives.size() << " primitives, "
            << scene.fruit_instance_ids.size() << " fruits)\n";
  if (!cloud_path.empty()) {
    const FruitCloud cloud = ground_truth_fruit_cloud(scene, density);
    PlyCloud ply;
    ply.points = cloud.points;
    ply.instance = cloud.instance;
    ply.cls.assign(cloud.points.size(), static_cast<int>(SemanticClass::kFruit));
    write_ply(cloud_path, ply);
    std::cout << "wrote " << cloud_path << " (" << cloud.points.size() << " points)\n";
  }
  return 0;
}

int cmd_run(ExperimentConfig cfg) {
  std::vector<RowResult> maps;
  const std::vector<ResultRow> rows = run_experiment(cfg, &maps);
  const std::string dir = export_results(cfg, rows, maps);
  print_summary(rows);
  std::cout << "results in " << dir << " (config hash " << config_hash(cfg) << ")\n";
  return 0;
}

int cmd_ablate(ExperimentConfig cfg) {
  cfg.noise_enabled = true;

  struct Variant {
    const char* name;
    AblationFlags flags;
  };
  const std::vector<Variant> variants = {
      {"full", {}},
      {"no-confidence", {.no_confidence = true}},
      {"exploration-only", {.exploration_only = true}},
      {"no-downsample", {.no_downsample = true}},
  };

  for (const Variant& v : variants) {
    ExperimentConfig run_cfg = cfg;
    run_cfg.ablation = v.flags;
    run_cfg.output_dir = (std::filesystem::path(cfg.output_dir) / v.name).string();
    std::cout << "=== ablation: " << v.name << " ===\n";
    std::vector<RowResult> maps;
    const auto rows = run_experiment(run_cfg, &maps);
    export_results(run_cfg, rows, maps);
    print_summary(rows);
  }
  return 0;
}

int cmd_report(const std::string& dir) {
  namespace fs = std::filesystem;
  struct Key {
    std::string method;
    double noise_p;
    bool operator<(const Key& o) const {
      return std::tie(method, noise_p) < std::tie(o.method, o.noise_p);
    }
  };
  struct Acc {
    std::vector<double> chamfer, precision, recall, f1, vol, cnt;
  };
  std::map<Key, Acc> table;

  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("metrics_", 0) != 0 || entry.path().extension() != ".csv") continue;
    std::istringstream in(read_text_file(entry.path().string()));
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
      std::vector<std::string> cells;
      std::stringstream ss(line);
      std::string cell;
      while (std::getline(ss, cell, ',')) cells.push_back(cell);
      if (cells.size() < 12 || cells[4] == "0") continue;
      Acc& acc = table[{cells[1], std::stod(cells[2])}];
      acc.chamfer.push_back(std::stod(cells[5]));
      acc.precision.push_back(std::stod(cells[6]));
      acc.recall.push_back(std::stod(cells[7]));
      acc.f1.push_back(std::stod(cells[8]));
      acc.vol.push_back(std::stod(cells[9]));
      acc.cnt.push_back(std::stod(cells[11]));
    }
  }
  if (table.empty()) {
    std::cerr << "no metrics_*.csv found in " << dir << "\n";
    return 1;
  }

  auto mean_std = [](const std::vector<double>& v) {
    double mean = 0;
    for (double x : v) mean += x;
    mean /= v.size();
    double var = 0;
    for (double x : v) var += (x - mean) * (x - mean);
    var = v.size() > 1 ? var / (v.size() - 1) : 0.0;
    std::ostringstream out;
    out << std::fixed << std::setprecision(3) << mean << " +- " << std::sqrt(var);
    return out.str();
  };

  std::cout << std::left << std::setw(16) << "method" << std::setw(9) << "noise_p" << std::setw(7)
            << "n" << std::setw(20) << "chamfer" << std::setw(20) << "precision" << std::setw(20)
            << "recall" << std::setw(20) << "f1" << std::setw(20) << "volume%" << std::setw(20)
            << "count%" << "\n";
  for (const auto& [key, acc] : table) {
    std::cout << std::left << std::setw(16) << key.method << std::setw(9) << key.noise_p
              << std::setw(7) << acc.f1.size() << std::setw(20) << mean_std(acc.chamfer)
              << std::setw(20) << mean_std(acc.precision) << std::setw(20) << mean_std(acc.recall)
              << std::setw(20) << mean_std(acc.f1) << std::setw(20) << mean_std(acc.vol)
              << std::setw(20) << mean_std(acc.cnt) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hortimap: active semantic mapping of procedural crop rows"};
  app.require_subcommand(1);

  // generate-scene
  auto* gen = app.add_subcommand("generate-scene", "generate a procedural scene JSON");
  std::string gen_config, gen_out = "scene.json", gen_cloud;
  std::uint64_t gen_seed = 1;
  double gen_density = 1e5;
  gen->add_option("--config", gen_config, "experiment config JSON (scene section is used)");
  gen->add_option("--seed", gen_seed, "scene RNG seed");
  gen->add_option("--out", gen_out, "output scene path");
  gen->add_option("--fruit-cloud", gen_cloud, "also write the GT fruit cloud PLY here");
  gen->add_option("--density", gen_density, "fruit cloud surface density (points/m^2)");

  // run
  auto* run = app.add_subcommand("run", "run the active mapping experiment");
  std::string run_config, run_method, run_out;
  std::vector<std::uint64_t> run_seeds;
  std::vector<int> run_rows;
  double run_noise_p = -1;
  bool flag_no_noise = false, flag_no_conf = false, flag_explor = false, flag_no_down = false;
  run->add_option("--config", run_config, "experiment config JSON");
  run->add_option("--method", run_method, "hybrid | octomap-0.01 | octomap-0.015");
  run->add_option("--out", run_out, "output directory");
  run->add_option("--seed", run_seeds, "scene seed(s), repeatable");
  run->add_option("--rows", run_rows, "row ids to map (default: all)");
  run->add_option("--noise", run_noise_p, "enable segmentation noise with this P(correct)");
  run->add_flag("--no-noise", flag_no_noise, "force noise off");
  run->add_flag("--no-confidence", flag_no_conf, "ablation: drop conf^2 weighting in the loss");
  run->add_flag("--exploration-only", flag_explor, "ablation: no exploitation viewpoints");
  run->add_flag("--no-downsample", flag_no_down, "ablation: keep every non-target splat");

  // ablate
  auto* abl = app.add_subcommand("ablate", "run the ablation variant set under noise");
  std::string abl_config, abl_out;
  abl->add_option("--config", abl_config, "experiment config JSON");
  abl->add_option("--out", abl_out, "output directory");

  // report
  auto* rep = app.add_subcommand("report", "aggregate metrics CSVs into a mean/std table");
  std::string rep_dir = "out";
  rep->add_option("--dir", rep_dir, "directory containing metrics_*.csv");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_generate_scene(gen_config, gen_seed, gen_out, gen_cloud,
                                                 gen_density);
    if (run->parsed()) {
      ExperimentConfig cfg = load_config(run_config);
      if (!run_method.empty()) cfg.method = method_from_name(run_method);
      if (!run_out.empty()) cfg.output_dir = run_out;
      if (!run_seeds.empty()) cfg.seeds = run_seeds;
      if (!run_rows.empty()) cfg.rows = run_rows;
      if (run_noise_p >= 0) {
        cfg.noise_enabled = true;
        cfg.noise.p_correct = run_noise_p;
      }
      if (flag_no_noise) cfg.noise_enabled = false;
      if (flag_no_conf) cfg.ablation.no_confidence = true;
      if (flag_explor) cfg.ablation.exploration_only = true;
      if (flag_no_down) cfg.ablation.no_downsample = true;
      return cmd_run(cfg);
    }
    if (abl->parsed()) {
      ExperimentConfig cfg = load_config(abl_config);
      if (!abl_out.empty()) cfg.output_dir = abl_out;
      return cmd_ablate(cfg);
    }
    if (rep->parsed()) return cmd_report(rep_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
