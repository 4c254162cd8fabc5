#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "vanish/data.hpp"
#include "vanish/model_io.hpp"
#include "vanish/oavi.hpp"
#include "vanish/pipeline.hpp"

namespace {

using namespace vanish;

int env_threads() {
  const char* env = std::getenv("VANISH_THREADS");
  if (!env) return 1;
  const int v = std::atoi(env);
  return v > 0 ? v : 1;
}

void require_file(const std::string& path) {
  if (!std::filesystem::exists(path))
    throw std::invalid_argument("input file does not exist: " + path);
}

OaviOptions make_options(const std::string& solver, const std::string& mode, double epsilon,
                         int max_iters, double stall) {
  const auto s = parse_solver(solver);
  if (!s) throw std::invalid_argument("unknown solver: " + solver);
  const auto m = parse_mode(mode);
  if (!m) throw std::invalid_argument("unknown mode: " + mode);
  if (!mode_allowed(*s, *m))
    throw std::invalid_argument("mode '" + mode + "' cannot pair with solver '" + solver + "'");
  OaviOptions opts;
  opts.solver = *s;
  opts.mode = *m;
  opts.epsilon = epsilon;
  opts.max_iterations = max_iters;
  opts.stall_threshold = stall;
  return opts;
}

bool header_has_column(const std::string& path, const std::string& name) {
  std::ifstream in(path);
  std::string line;
  if (!in || !std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (line.substr(start, comma == std::string::npos ? std::string::npos : comma - start) == name)
      return true;
    if (comma == std::string::npos) return false;
    start = comma + 1;
  }
}

Dataset load_maybe_labeled(const std::string& path, const std::string& label_col) {
  require_file(path);
  const bool labeled = !label_col.empty() && header_has_column(path, label_col);
  return load_csv(path, labeled ? label_col : std::string());
}

Dataset sample_rows(const Dataset& ds, Index m, std::uint64_t seed) {
  if (m > ds.rows()) throw std::invalid_argument("sample size exceeds available rows");
  std::vector<Index> idx(static_cast<std::size_t>(ds.rows()));
  for (Index i = 0; i < ds.rows(); ++i) idx[static_cast<std::size_t>(i)] = i;
  Rng rng(seed);
  for (std::size_t i = idx.size(); i > 1; --i)
    std::swap(idx[i - 1], idx[static_cast<std::size_t>(rng.below(i))]);
  Dataset out;
  out.feature_names = ds.feature_names;
  out.label_names = ds.label_names;
  out.X.resize(m, ds.X.cols());
  if (ds.has_labels()) out.y.resize(m);
  for (Index i = 0; i < m; ++i) {
    out.X.row(i) = ds.X.row(idx[static_cast<std::size_t>(i)]);
    if (ds.has_labels()) out.y[i] = ds.y[idx[static_cast<std::size_t>(i)]];
  }
  return out;
}

void warn_if_psi_loose(double psi) {
  if (psi >= 1.0)
    std::cerr << "warning: psi >= 1 accepts every candidate immediately; generators will be "
                 "degree-one only\n";
}

int run_fit(const std::string& input, const std::string& label_col, double psi, double tau,
            const std::string& solver, const std::string& mode, double classifier_radius,
            bool grid, std::uint64_t seed, double epsilon, int max_iters, double stall,
            const std::string& trace_path, const std::string& output) {
  OaviOptions opts = make_options(solver, mode, epsilon, max_iters, stall);
  Dataset train = load_maybe_labeled(input, label_col);
  if (!train.has_labels())
    throw std::invalid_argument("fit needs a label column ('" + label_col + "' not in header)");

  std::ofstream trace;
  if (!trace_path.empty()) {
    trace.open(trace_path);
    if (!trace) throw std::runtime_error("cannot open trace file: " + trace_path);
    opts.trace = &trace;
  }

  const int threads = env_threads();
  if (grid) {
    const GridChoice choice = cross_validate(train, default_psi_grid(), default_radius_grid(),
                                             tau, opts, 3, seed, threads);
    psi = choice.psi;
    classifier_radius = choice.classifier_radius;
    std::cout << "grid: psi=" << format_double(psi) << " classifier_radius="
              << format_double(classifier_radius) << " cv_error=" << format_double(choice.cv_error)
              << "\n";
  }
  warn_if_psi_loose(psi);

  std::vector<double> class_seconds;
  const ClassifierModel model =
      fit_pipeline(train, psi, tau, opts, classifier_radius, threads, &class_seconds);

  double total_seconds = 0.0;
  for (std::size_t c = 0; c < model.class_models.size(); ++c) {
    const GeneratorModel& gm = model.class_models[c];
    std::cout << "class " << model.label_names[c] << ": generators=" << gm.generators.size()
              << " order_terms=" << gm.O.size() << " max_degree=" << gm.max_degree
              << " seconds=" << format_double(class_seconds[c]) << "\n";
    total_seconds += class_seconds[c];
  }
  try {
    std::cout << "sparsity: " << format_double(sparsity(model.class_models)) << "\n";
  } catch (const std::domain_error&) {
    std::cout << "sparsity: -\n";
  }
  std::cout << "generator fit seconds: " << format_double(total_seconds) << "\n";
  std::cout << "train error: " << format_double(error_rate(predict(model, train.X), train.y))
            << "\n";
  if (!output.empty()) {
    save_model(model, output);
    std::cout << "model written to " << output << "\n";
  }
  return 0;
}

int run_transform(const std::string& model_path, const std::string& input,
                  const std::string& label_col, const std::string& output) {
  require_file(model_path);
  const ClassifierModel model = load_classifier_model(model_path);
  const Dataset ds = load_maybe_labeled(input, label_col);
  const Matrix F = transform_features(model.class_models, apply_scaler(model.scaler, ds.X));

  Dataset out;
  out.X = F;
  for (std::size_t c = 0; c < model.class_models.size(); ++c)
    for (std::size_t k = 0; k < model.class_models[c].generators.size(); ++k)
      out.feature_names.push_back("g_" + model.label_names[c] + "_" + std::to_string(k));
  save_csv(out, output);
  std::cout << "wrote " << F.rows() << " x " << F.cols() << " feature matrix to " << output << "\n";
  return 0;
}

int run_predict(const std::string& model_path, const std::string& input,
                const std::string& label_col, const std::string& output) {
  require_file(model_path);
  const ClassifierModel model = load_classifier_model(model_path);
  const Dataset ds = load_maybe_labeled(input, label_col);
  const IntVector pred = predict(model, ds.X);

  if (!output.empty()) {
    std::ofstream out(output);
    if (!out) throw std::runtime_error("cannot write " + output);
    out << "label\n";
    for (Index i = 0; i < pred.size(); ++i)
      out << model.label_names[static_cast<std::size_t>(pred[i])] << "\n";
  }
  if (ds.has_labels()) {
    // Compare by token: the file's label ids follow first appearance there,
    // which need not match the model's class order.
    Index wrong = 0;
    for (Index i = 0; i < pred.size(); ++i)
      if (model.label_names[static_cast<std::size_t>(pred[i])] !=
          ds.label_names[static_cast<std::size_t>(ds.y[i])])
        ++wrong;
    std::cout << "error rate: "
              << format_double(static_cast<double>(wrong) / static_cast<double>(pred.size()))
              << "\n";
  } else {
    std::cout << "predicted " << pred.size() << " rows\n";
  }
  return 0;
}

int run_bench(const std::string& input, const std::string& label_col,
              const std::vector<long long>& sizes, int repeats,
              const std::vector<std::string>& solvers, const std::vector<std::string>& modes,
              double psi, double tau, std::uint64_t seed, Index per_class, double noise,
              const std::string& output) {
  if (sizes.empty()) throw std::invalid_argument("bench needs --sizes");
  if (repeats < 1) throw std::invalid_argument("bench needs --repeats >= 1");
  if (solvers.size() != modes.size())
    throw std::invalid_argument("--solvers and --modes must have equal length");
  std::vector<OaviOptions> configs;
  for (std::size_t i = 0; i < solvers.size(); ++i)
    configs.push_back(make_options(solvers[i], modes[i], -1.0, 10000, -1.0));
  warn_if_psi_loose(psi);

  Dataset pool;
  if (input.empty()) {
    pool = generate_synthetic(per_class, noise, seed);
  } else {
    pool = load_maybe_labeled(input, label_col);
    if (!pool.has_labels()) throw std::invalid_argument("bench data needs labels");
  }

  std::ofstream detail;
  if (!output.empty()) {
    detail.open(output);
    if (!detail) throw std::runtime_error("cannot write " + output);
    detail << "solver,mode,m,repeat,fit_seconds,generators,order_terms\n";
  }

  for (std::size_t ci = 0; ci < configs.size(); ++ci) {
    for (const long long m : sizes) {
      std::vector<double> secs;
      long long gens = 0, order = 0;
      for (int rep = 0; rep < repeats; ++rep) {
        const Dataset sub = sample_rows(pool, static_cast<Index>(m), seed + 1000 * rep + 7);
        std::vector<double> class_seconds;
        const ClassifierModel model =
            fit_pipeline(sub, psi, tau, configs[ci], 1.0, 1, &class_seconds);
        double t = 0.0;
        for (const double s : class_seconds) t += s;
        gens = order = 0;
        for (const GeneratorModel& gm : model.class_models) {
          gens += static_cast<long long>(gm.generators.size());
          order += static_cast<long long>(gm.O.size());
        }
        secs.push_back(t);
        if (detail.is_open())
          detail << solvers[ci] << ',' << modes[ci] << ',' << m << ',' << rep << ','
                 << format_double(t) << ',' << gens << ',' << order << "\n";
      }
      double mean = 0.0;
      for (const double s : secs) mean += s;
      mean /= static_cast<double>(secs.size());
      double var = 0.0;
      for (const double s : secs) var += (s - mean) * (s - mean);
      const double stdev = secs.size() > 1 ? std::sqrt(var / static_cast<double>(secs.size() - 1)) : 0.0;
      std::cout << "solver=" << solvers[ci] << " mode=" << modes[ci] << " m=" << m
                << " fit_seconds mean=" << format_double(mean) << " std=" << format_double(stdev)
                << " generators=" << gens << " order_terms=" << order << "\n";
    }
  }
  return 0;
}

int run_generate(Index rows, double noise, std::uint64_t seed, const std::string& output) {
  save_csv(generate_synthetic(rows, noise, seed), output);
  std::cout << "wrote " << 2 * rows << " rows to " << output << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"approximate vanishing ideal toolkit: generator construction, feature "
               "transforms and linear classification"};
  app.require_subcommand(1);

  std::string input, label_col = "label", output, model_path, trace_path;
  std::string solver = "cg", mode = "ihb";
  double psi = 0.005, tau = 1000.0, classifier_radius = 10.0;
  double epsilon = -1.0, stall = -1.0, noise = 0.0;
  int max_iters = 10000, repeats = 3;
  std::uint64_t seed = 1;
  Index rows = 1000, per_class = 100000;
  bool grid = false;
  std::vector<long long> sizes;
  std::vector<std::string> solvers{"cg"}, modes{"ihb"};

  CLI::App* fit = app.add_subcommand("fit", "train a generator-feature classifier on a CSV");
  fit->add_option("--input", input, "training CSV")->required();
  fit->add_option("--label-col", label_col, "label column name");
  fit->add_option("--psi", psi, "mean squared error tolerance");
  fit->add_option("--tau", tau, "l1 budget on generator coefficients (>= 2)");
  fit->add_option("--solver", solver, "agd | cg | pcg | bpcg");
  fit->add_option("--mode", mode, "plain | ihb | wihb");
  fit->add_option("--classifier-radius", classifier_radius, "l1 budget per classifier row");
  fit->add_flag("--grid", grid, "pick psi and classifier radius by cross validation");
  fit->add_option("--seed", seed, "cross validation shuffle seed");
  fit->add_option("--epsilon", epsilon, "solver gap tolerance (<= 0 uses 0.01 psi)");
  fit->add_option("--max-iters", max_iters, "solver iteration cap");
  fit->add_option("--stall", stall, "solver stall threshold (< 0 uses 0.0001 psi, 0 disables)");
  fit->add_option("--trace", trace_path, "write per-iteration solver traces to this file");
  fit->add_option("--output", output, "write the fitted model as JSON");

  CLI::App* transform = app.add_subcommand("transform", "map a CSV through |g| feature columns");
  transform->add_option("--model", model_path, "fitted model JSON")->required();
  transform->add_option("--input", input, "data CSV")->required();
  transform->add_option("--label-col", label_col, "label column to drop if present");
  transform->add_option("--output", output, "feature CSV destination")->required();

  CLI::App* predict_cmd = app.add_subcommand("predict", "predict labels with a fitted model");
  predict_cmd->add_option("--model", model_path, "fitted model JSON")->required();
  predict_cmd->add_option("--input", input, "data CSV")->required();
  predict_cmd->add_option("--label-col", label_col, "label column for error reporting");
  predict_cmd->add_option("--output", output, "write predicted labels here");

  CLI::App* bench = app.add_subcommand("bench", "time generator construction on sampled subsets");
  bench->add_option("--input", input, "labeled CSV pool (omit to use synthetic data)");
  bench->add_option("--label-col", label_col, "label column name");
  bench->add_option("--sizes", sizes, "subset sizes (comma separated)")
      ->required()
      ->delimiter(',');
  bench->add_option("--repeats", repeats, "repeats per size");
  bench->add_option("--solvers", solvers, "solver per config (comma separated)")->delimiter(',');
  bench->add_option("--modes", modes, "mode per config (comma separated)")->delimiter(',');
  bench->add_option("--psi", psi, "mean squared error tolerance");
  bench->add_option("--tau", tau, "l1 budget on generator coefficients");
  bench->add_option("--seed", seed, "sampling seed");
  bench->add_option("--per-class", per_class, "synthetic pool rows per class");
  bench->add_option("--noise", noise, "synthetic pool noise std");
  bench->add_option("--output", output, "write per-repeat rows as CSV");

  CLI::App* generate = app.add_subcommand("generate", "write the synthetic two-class dataset");
  generate->add_option("--rows", rows, "points per class");
  generate->add_option("--noise", noise, "additive noise std");
  generate->add_option("--seed", seed, "rng seed");
  generate->add_option("--output", output, "CSV destination")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(fit))
      return run_fit(input, label_col, psi, tau, solver, mode, classifier_radius, grid, seed,
                     epsilon, max_iters, stall, trace_path, output);
    if (app.got_subcommand(transform))
      return run_transform(model_path, input, label_col, output);
    if (app.got_subcommand(predict_cmd))
      return run_predict(model_path, input, label_col, output);
    if (app.got_subcommand(bench))
      return run_bench(input, label_col, sizes, repeats, solvers, modes, psi, tau, seed,
                       per_class, noise, output);
    if (app.got_subcommand(generate))
      return run_generate(rows, noise, seed, output);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
