#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "repsim/analysis.hpp"
#include "repsim/errors.hpp"
#include "repsim/index.hpp"
#include "repsim/io.hpp"
#include "repsim/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;
constexpr int kExitDegenerate = 4;

repsim::ActivationMatrix load_centered(const fs::path& path) {
  return repsim::center_columns(
      repsim::load_matrix(path, repsim::detect_format(path)));
}

// Layer files in lexicographic filename order. *.json files are skipped
// (manifests); a layers.json listing overrides the ordering.
std::pair<std::vector<repsim::ActivationMatrix>, std::vector<std::string>>
load_layer_dir(const fs::path& dir) {
  if (!fs::is_directory(dir))
    throw repsim::io_error("not a directory: " + dir.string());
  std::vector<fs::path> files;
  const fs::path manifest = dir / "layers.json";
  if (fs::exists(manifest)) {
    std::ifstream in(manifest);
    ordered_json order = ordered_json::parse(in, nullptr, true);
    for (const auto& name : order) files.push_back(dir / name.get<std::string>());
  } else {
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (!entry.is_regular_file()) continue;
      if (entry.path().extension() == ".json") continue;
      files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) {
                return a.filename().string() < b.filename().string();
              });
  }
  if (files.empty())
    throw repsim::validation_error("empty directory: " + dir.string());
  std::vector<repsim::ActivationMatrix> layers;
  std::vector<std::string> labels;
  for (const fs::path& file : files) {
    layers.push_back(load_centered(file));
    labels.push_back(file.stem().string());
  }
  return {std::move(layers), std::move(labels)};
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::fputs(text.c_str(), stdout);
  } else {
    std::ofstream out(out_path, std::ios::trunc);
    if (!out) throw repsim::io_error("cannot write " + out_path);
    out << text;
  }
}

// Options shared by the index-evaluating subcommands.
struct IndexOptions {
  std::string index_name = "cka-linear";
  double bandwidth_fraction = 0.4;
  double variance_threshold = 0.99;
  double kappa_x = 0.0;
  double kappa_y = 0.0;
  std::string normalization = "vn-trace";
  std::string direction = "fit-first";
  double rank_tol = repsim::kDefaultRankTol;

  repsim::SimilarityIndexSpec to_spec() const {
    repsim::SimilarityIndexSpec spec;
    spec.name = repsim::parse_index_name(index_name);
    spec.bandwidth_fraction = bandwidth_fraction;
    spec.variance_threshold = variance_threshold;
    spec.ridge.kappa_x = kappa_x;
    spec.ridge.kappa_y = kappa_y;
    if (normalization == "vn-trace")
      spec.ridge.normalization = repsim::RidgeNormalization::vn_trace;
    else if (normalization == "cauchy-schwarz-min")
      spec.ridge.normalization = repsim::RidgeNormalization::cauchy_schwarz_min;
    else if (normalization == "separable")
      spec.ridge.normalization = repsim::RidgeNormalization::separable;
    else
      throw repsim::validation_error("unknown normalization '" + normalization + "'");
    if (direction == "fit-first")
      spec.direction = repsim::FitDirection::fit_first;
    else if (direction == "fit-second")
      spec.direction = repsim::FitDirection::fit_second;
    else
      throw repsim::validation_error("unknown direction '" + direction + "'");
    spec.rank_tol = rank_tol;
    return spec;
  }

  void attach(CLI::App* cmd, bool with_index = true) {
    if (with_index)
      cmd->add_option("--index", index_name,
                      "similarity index (cka-linear, cka-rbf, hsic-linear, hsic-rbf, "
                      "cca-r2, cca-rho, svcca-r2, svcca-rho, pwcca, pwcca-modified, "
                      "linreg, ridge, procrustes)");
    cmd->add_option("--bandwidth-fraction", bandwidth_fraction,
                    "RBF sigma as a fraction of the median pairwise distance "
                    "(presets 0.2/0.4/0.8)");
    cmd->add_option("--variance-threshold", variance_threshold,
                    "SVCCA cumulative variance threshold in (0,1]");
    cmd->add_option("--kappa-x", kappa_x, "ridge penalty for the first input");
    cmd->add_option("--kappa-y", kappa_y, "ridge penalty for the second input");
    cmd->add_option("--normalization", normalization,
                    "ridge normalization: vn-trace | cauchy-schwarz-min | separable");
    cmd->add_option("--direction", direction,
                    "regression direction: fit-first | fit-second");
    cmd->add_option("--rank-tol", rank_tol, "relative singular-value cutoff");
  }
};

ordered_json score_json(const repsim::SimilarityScore& score,
                        const repsim::SimilarityIndexSpec& spec) {
  ordered_json j;
  j["index"] = repsim::index_name_string(spec.name);
  j["params"] = repsim::index_spec_json(spec);
  j["value"] = score.value;
  j["normalized"] = score.normalized;
  ordered_json meta;
  meta["centering"] = "columns";
  for (const auto& [key, value] : score.metadata) meta[key] = value;
  j["metadata"] = meta;
  return j;
}

int run_compare(const std::string& file_a, const std::string& file_b,
                const IndexOptions& opts, const std::string& out_path) {
  const repsim::SimilarityIndexSpec spec = opts.to_spec();
  const repsim::ActivationMatrix a = load_centered(file_a);
  const repsim::ActivationMatrix b = load_centered(file_b);
  const repsim::SimilarityScore score = repsim::evaluate_index(spec, a, b);

  ordered_json j = score_json(score, spec);
  j["inputs"] = {{"a", file_a},
                 {"b", file_b},
                 {"n", a.n()},
                 {"p_a", a.p()},
                 {"p_b", b.p()}};
  std::string text = repsim::index_name_string(spec.name) + " = " +
                     repsim::format_double(score.value) + "\n" + j.dump(2) + "\n";
  emit(text, out_path);
  return 0;
}

void require_format(const std::string& format) {
  if (format != "json" && format != "csv")
    throw repsim::validation_error("--format must be json or csv, got '" + format + "'");
}

int run_matrix(const std::string& dir_a, const std::string& dir_b,
               const IndexOptions& opts, bool do_symmetrize,
               const std::string& format, const std::string& out_path) {
  require_format(format);
  const repsim::SimilarityIndexSpec spec = opts.to_spec();
  auto [layers_a, labels_a] = load_layer_dir(dir_a);
  auto [layers_b, labels_b] = load_layer_dir(dir_b);
  repsim::SimilarityMatrixReport report =
      repsim::similarity_matrix(layers_a, layers_b, spec, labels_a, labels_b);
  if (do_symmetrize) report = repsim::symmetrize(report);
  if (format == "csv") {
    emit(repsim::report_csv(report), out_path);
  } else {
    emit(repsim::report_json(report).dump(2) + "\n", out_path);
  }
  return 0;
}

int run_sanity_check(const std::vector<std::string>& dirs,
                     const std::vector<std::string>& index_names,
                     IndexOptions opts, const std::vector<std::string>& exclude,
                     const std::string& out_path) {
  if (dirs.size() < 2)
    throw repsim::validation_error("sanity-check needs at least 2 network directories");
  std::vector<std::vector<repsim::ActivationMatrix>> networks;
  std::vector<std::string> labels;
  for (const std::string& dir : dirs) {
    auto [layers, layer_labels] = load_layer_dir(dir);
    if (networks.empty()) labels = layer_labels;
    else if (layers.size() != networks.front().size())
      throw repsim::validation_error("layer-count mismatch: " + dir);
    networks.push_back(std::move(layers));
  }

  ordered_json out;
  out["command"] = "sanity-check";
  out["networks"] = dirs;
  out["layers"] = labels;
  out["excluded"] = exclude;
  out["pair_aggregation"] = "unordered";
  ordered_json results = ordered_json::array();
  std::vector<double> accs, ses;
  for (const std::string& name : index_names) {
    opts.index_name = name;
    const repsim::SimilarityIndexSpec spec = opts.to_spec();
    const repsim::SanityCheckResult r =
        repsim::sanity_check(networks, spec, labels, exclude);
    ordered_json rj;
    rj["index"] = name;
    rj["params"] = repsim::index_spec_json(spec);
    rj["accuracy"] = r.accuracy;
    rj["jackknife_se"] = r.jackknife_se;
    rj["symmetrized"] = r.symmetrized;
    ordered_json pairs = ordered_json::array();
    for (size_t k = 0; k < r.pairs.size(); ++k) {
      ordered_json pj;
      pj["a"] = r.pairs[k].first;
      pj["b"] = r.pairs[k].second;
      pj["accuracy"] = r.per_pair_accuracy[k];
      pj["per_layer_argmax"] = r.per_pair[k].per_layer_argmax;
      pairs.push_back(pj);
    }
    rj["per_pair"] = pairs;
    results.push_back(rj);
    accs.push_back(r.accuracy);
    ses.push_back(r.jackknife_se);
  }
  out["results"] = results;

  if (index_names.size() > 1) {
    const size_t best =
        static_cast<size_t>(std::max_element(accs.begin(), accs.end()) - accs.begin());
    out["best_index"] = index_names[best];
    ordered_json ztests = ordered_json::array();
    for (size_t k = 0; k < index_names.size(); ++k) {
      if (k == best) continue;
      const repsim::ZTestResult zt =
          repsim::jackknife_z_test(accs[best], ses[best], accs[k], ses[k]);
      ztests.push_back({{"index", index_names[k]}, {"z", zt.z}, {"p", zt.p}});
    }
    out["z_test_vs_best"] = ztests;
  }
  emit(out.dump(2) + "\n", out_path);
  return 0;
}

int run_spectrum(const std::string& file_a, const std::string& file_b,
                 Eigen::Index components, const std::string& format,
                 const std::string& out_path) {
  require_format(format);
  const repsim::ActivationMatrix a = load_centered(file_a);
  const repsim::ActivationMatrix b = load_centered(file_b);
  const repsim::SpectrumReport report =
      repsim::shared_subspace_spectrum(a, b, components);
  if (format == "csv") {
    std::string text = "component,own_scaling,cross_scaling,cosine\n";
    for (Eigen::Index i = 0; i < report.own_scaling.size(); ++i)
      text += std::to_string(i) + "," + repsim::format_double(report.own_scaling(i)) +
              "," + repsim::format_double(report.cross_scaling(i)) + "," +
              repsim::format_double(report.cosine(i)) + "\n";
    emit(text, out_path);
    return 0;
  }
  ordered_json j = repsim::spectrum_report_json(report);
  j["inputs"] = {{"a", file_a}, {"b", file_b}};
  emit(j.dump(2) + "\n", out_path);
  return 0;
}

struct GenOptions {
  std::string out_dir;
  std::string kind = "pair";
  long n = 32;
  long p = 32;
  uint64_t seed = 0;
  std::string relation = "independent";
  double scale = 2.0;
  std::vector<long> shared_indices;
  double decay = 0.5;
  double noise = 0.0;
  long layers = 8;
  long networks = 2;
  long signal_rank = 4;
  double stack_noise = 0.1;
};

int run_gen(const GenOptions& g) {
  const fs::path out(g.out_dir);
  fs::create_directories(out);

  ordered_json manifest;
  manifest["command"] = "gen";
  manifest["kind"] = g.kind;
  manifest["n"] = g.n;
  manifest["p"] = g.p;
  manifest["seed"] = g.seed;
  manifest["generator"] = "philox4x32-10/box-muller";
  std::vector<std::string> files;

  if (g.kind == "single") {
    repsim::save_rsm(out / "a.rsm", repsim::gen_random(g.n, g.p, g.seed).data);
    files = {"a.rsm"};
  } else if (g.kind == "pair") {
    manifest["relation"] = g.relation;
    repsim::ActivationMatrix a = repsim::gen_random(g.n, g.p, g.seed);
    repsim::ActivationMatrix b;
    if (g.relation == "independent") {
      manifest["seed_b"] = g.seed + 1;
      b = repsim::gen_random(g.n, g.p, g.seed + 1);
    } else if (g.relation == "shared-subspace") {
      repsim::SynthSpec spec;
      spec.n = g.n;
      spec.p = g.p;
      spec.seed = g.seed;
      spec.relation.kind = repsim::RelationKind::shared_subspace;
      for (long idx : g.shared_indices) spec.shared_indices.push_back(idx);
      spec.spectrum_decay = g.decay;
      spec.noise_level = g.noise;
      manifest["shared_indices"] = g.shared_indices;
      manifest["spectrum_decay"] = g.decay;
      manifest["noise_level"] = g.noise;
      std::tie(a, b) = repsim::gen_shared_subspace_pair(spec);
    } else {
      repsim::Relation rel;
      if (g.relation == "orthogonal-transform")
        rel.kind = repsim::RelationKind::orthogonal_transform;
      else if (g.relation == "invertible-transform")
        rel.kind = repsim::RelationKind::invertible_transform;
      else if (g.relation == "isotropic-scale") {
        rel.kind = repsim::RelationKind::isotropic_scale;
        rel.scale = g.scale;
        manifest["scale"] = g.scale;
      } else {
        throw repsim::validation_error("unknown relation '" + g.relation + "'");
      }
      repsim::AppliedRelation applied = repsim::apply_relation(a, rel, g.seed);
      if (rel.kind == repsim::RelationKind::invertible_transform)
        manifest["condition_number"] = applied.condition_number;
      b = std::move(applied.matrix);
    }
    repsim::save_rsm(out / "a.rsm", a.data);
    repsim::save_rsm(out / "b.rsm", b.data);
    files = {"a.rsm", "b.rsm"};
  } else if (g.kind == "stack") {
    manifest["layers"] = g.layers;
    manifest["networks"] = g.networks;
    manifest["signal_rank"] = g.signal_rank;
    manifest["noise_level"] = g.stack_noise;
    manifest["structural_seed"] = g.seed;
    std::vector<uint64_t> net_seeds;
    for (long i = 0; i < g.networks; ++i)
      net_seeds.push_back(g.seed + 1 + static_cast<uint64_t>(i));
    manifest["network_seeds"] = net_seeds;
    for (long i = 0; i < g.networks; ++i) {
      const fs::path net_dir = out / ("net" + std::to_string(i));
      fs::create_directories(net_dir);
      const std::vector<repsim::ActivationMatrix> stack = repsim::gen_layer_stack(
          g.layers, g.n, g.p, g.seed, net_seeds[static_cast<size_t>(i)],
          g.stack_noise, g.signal_rank);
      for (long l = 0; l < g.layers; ++l) {
        char name[32];
        std::snprintf(name, sizeof name, "layer%02ld.rsm", l);
        repsim::save_rsm(net_dir / name, stack[static_cast<size_t>(l)].data);
        files.push_back("net" + std::to_string(i) + "/" + name);
      }
    }
  } else {
    throw repsim::validation_error("unknown gen kind '" + g.kind + "'");
  }

  manifest["files"] = files;
  const std::string text = manifest.dump(2) + "\n";
  std::ofstream mf(out / "manifest.json", std::ios::trunc);
  if (!mf) throw repsim::io_error("cannot write manifest.json");
  mf << text;
  std::fputs(text.c_str(), stdout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"representational similarity indexes over activation matrices"};
  app.require_subcommand(1);

  // compare
  auto* compare = app.add_subcommand("compare", "similarity of two matrices");
  std::string cmp_a, cmp_b, cmp_out, cmp_format = "json";
  IndexOptions cmp_opts;
  compare->add_option("file_a", cmp_a)->required();
  compare->add_option("file_b", cmp_b)->required();
  cmp_opts.attach(compare);
  compare->add_option("--format", cmp_format, "json (scalar line + JSON report)");
  compare->add_option("-o,--output", cmp_out, "write the JSON report here");

  // matrix
  auto* matrix = app.add_subcommand("matrix", "layer x layer similarity grid");
  std::string mat_a, mat_b, mat_out, mat_format = "json";
  bool mat_sym = false;
  IndexOptions mat_opts;
  matrix->add_option("dir_a", mat_a)->required();
  matrix->add_option("dir_b", mat_b)->required();
  mat_opts.attach(matrix);
  matrix->add_flag("--symmetrize", mat_sym, "emit S + S^T");
  matrix->add_option("--format", mat_format, "json | csv");
  matrix->add_option("-o,--output", mat_out);

  // sanity-check
  auto* sanity = app.add_subcommand(
      "sanity-check", "layer-correspondence accuracy across network directories");
  std::vector<std::string> san_dirs, san_indexes, san_exclude;
  std::string san_out;
  IndexOptions san_opts;
  sanity->add_option("dirs", san_dirs, "network directories (>= 2)")->required();
  sanity->add_option("--index", san_indexes, "index name (repeatable)");
  san_opts.attach(sanity, /*with_index=*/false);
  sanity->add_option("--exclude", san_exclude, "layer labels to drop (repeatable)");
  sanity->add_option("-o,--output", san_out);

  // spectrum
  auto* spect = app.add_subcommand(
      "spectrum", "action of one Gram operator on the other's eigenvectors");
  std::string spe_a, spe_b, spe_out, spe_format = "json";
  long spe_components = 0;
  spect->add_option("file_a", spe_a)->required();
  spect->add_option("file_b", spe_b)->required();
  spect->add_option("--components", spe_components, "max eigenvectors (0 = all)");
  spect->add_option("--format", spe_format, "json | csv");
  spect->add_option("-o,--output", spe_out);

  // gen
  auto* gen = app.add_subcommand("gen", "write synthetic matrices + manifest");
  GenOptions g;
  gen->add_option("--out", g.out_dir)->required();
  gen->add_option("--kind", g.kind, "single | pair | stack");
  gen->add_option("--n", g.n, "examples");
  gen->add_option("--p", g.p, "features");
  gen->add_option("--seed", g.seed);
  gen->add_option("--relation", g.relation,
                  "independent | orthogonal-transform | invertible-transform | "
                  "isotropic-scale | shared-subspace");
  gen->add_option("--scale", g.scale, "isotropic-scale factor");
  gen->add_option("--shared-indices", g.shared_indices,
                  "shared component slots (repeatable)");
  gen->add_option("--decay", g.decay, "eigenvalue i of each Gram is decay^i");
  gen->add_option("--noise", g.noise, "shared-subspace additive noise");
  gen->add_option("--layers", g.layers, "stack: layers per network");
  gen->add_option("--networks", g.networks, "stack: network count");
  gen->add_option("--signal-rank", g.signal_rank, "stack: shared signal rank");
  gen->add_option("--stack-noise", g.stack_noise, "stack: noise level");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (compare->parsed()) {
      if (cmp_format != "json")
        throw repsim::validation_error("compare emits json only");
      return run_compare(cmp_a, cmp_b, cmp_opts, cmp_out);
    }
    if (matrix->parsed())
      return run_matrix(mat_a, mat_b, mat_opts, mat_sym, mat_format, mat_out);
    if (sanity->parsed()) {
      if (san_indexes.empty()) san_indexes.push_back(san_opts.index_name);
      return run_sanity_check(san_dirs, san_indexes, san_opts, san_exclude, san_out);
    }
    if (spect->parsed())
      return run_spectrum(spe_a, spe_b, spe_components, spe_format, spe_out);
    if (gen->parsed()) return run_gen(g);
  } catch (const repsim::degenerate_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitDegenerate;
  } catch (const repsim::io_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitIo;
  } catch (const repsim::validation_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
