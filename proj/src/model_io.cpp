#include "vanish/model_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace vanish {

namespace {

using Json = nlohmann::ordered_json;

constexpr const char* kGeneratorSchema = "vanish-kit/model/v1";
constexpr const char* kPipelineSchema = "vanish-kit/pipeline/v1";

Json vector_to_json(const Vector& v) {
  Json arr = Json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Vector vector_from_json(const Json& arr) {
  Vector v(static_cast<Index>(arr.size()));
  Index at = 0;
  for (const Json& x : arr) v[at++] = x.get<double>();
  return v;
}

Json term_to_json(const Term& t) {
  Json arr = Json::array();
  for (int i = 0; i < t.nvars(); ++i) arr.push_back(t.exponent(i));
  return arr;
}

Term term_from_json(const Json& arr, int n) {
  if (static_cast<int>(arr.size()) != n)
    throw std::runtime_error("exponent list length does not match variable count");
  IntVector exps(n);
  Index at = 0;
  for (const Json& x : arr) exps[at++] = x.get<int>();
  return Term(exps);
}

Json generator_model_to_json(const GeneratorModel& m) {
  Json j;
  j["schema"] = kGeneratorSchema;
  j["n"] = m.n;
  j["psi"] = m.psi;
  j["tau"] = m.tau;
  j["solver"] = to_string(m.solver);
  j["mode"] = to_string(m.mode);
  j["max_degree"] = m.max_degree;
  if (m.boost_disabled_at)
    j["boost_disabled_at"] = *m.boost_disabled_at;
  else
    j["boost_disabled_at"] = nullptr;
  j["stats"] = Json{{"solver_iterations", m.stats.solver_iterations},
                    {"candidates", m.stats.candidates}};
  Json order = Json::array();
  for (const Term& t : m.O) order.push_back(term_to_json(t));
  j["O"] = std::move(order);
  Json gens = Json::array();
  for (const Polynomial& g : m.generators) {
    Json jg;
    jg["leading"] = term_to_json(g.leading);
    Json basis = Json::array();
    for (const Term& t : g.basis) {
      const Index idx = find_term(m.O, t);
      if (idx < 0) throw std::logic_error("generator basis term missing from O");
      basis.push_back(idx);
    }
    jg["basis"] = std::move(basis);
    jg["coeffs"] = vector_to_json(g.coeffs);
    gens.push_back(std::move(jg));
  }
  j["generators"] = std::move(gens);
  return j;
}

GeneratorModel generator_model_from_json(const Json& j) {
  if (j.at("schema").get<std::string>() != kGeneratorSchema)
    throw std::runtime_error("unexpected model schema tag");
  GeneratorModel m;
  m.n = j.at("n").get<int>();
  m.psi = j.at("psi").get<double>();
  m.tau = j.at("tau").get<double>();
  const auto solver = parse_solver(j.at("solver").get<std::string>());
  const auto mode = parse_mode(j.at("mode").get<std::string>());
  if (!solver || !mode) throw std::runtime_error("unknown solver or mode name");
  m.solver = *solver;
  m.mode = *mode;
  m.max_degree = j.at("max_degree").get<int>();
  if (!j.at("boost_disabled_at").is_null())
    m.boost_disabled_at = j.at("boost_disabled_at").get<long long>();
  if (j.contains("stats")) {
    m.stats.solver_iterations = j["stats"].value("solver_iterations", 0LL);
    m.stats.candidates = j["stats"].value("candidates", 0LL);
  }
  for (const Json& t : j.at("O")) m.O.push_back(term_from_json(t, m.n));
  for (const Json& jg : j.at("generators")) {
    Polynomial g;
    g.leading = term_from_json(jg.at("leading"), m.n);
    for (const Json& idx : jg.at("basis")) {
      const auto i = idx.get<Index>();
      if (i < 0 || i >= static_cast<Index>(m.O.size()))
        throw std::runtime_error("generator basis index out of range");
      g.basis.push_back(m.O[static_cast<std::size_t>(i)]);
    }
    g.coeffs = vector_from_json(jg.at("coeffs"));
    if (g.coeffs.size() != static_cast<Index>(g.basis.size()))
      throw std::runtime_error("generator coefficient count does not match basis");
    m.generators.push_back(std::move(g));
  }
  return m;
}

Json classifier_model_to_json(const ClassifierModel& m) {
  Json j;
  j["schema"] = kPipelineSchema;
  j["psi"] = m.psi;
  j["tau"] = m.tau;
  j["solver"] = to_string(m.solver);
  j["mode"] = to_string(m.mode);
  j["classifier_radius"] = m.classifier_radius;
  j["scaler"] = Json{{"min", vector_to_json(m.scaler.mins)}, {"max", vector_to_json(m.scaler.maxs)}};
  j["labels"] = m.label_names;
  Json models = Json::array();
  for (const GeneratorModel& gm : m.class_models) models.push_back(generator_model_to_json(gm));
  j["class_models"] = std::move(models);
  Json weights = Json::array();
  for (Index c = 0; c < m.linear.W.rows(); ++c)
    weights.push_back(vector_to_json(m.linear.W.row(c).transpose()));
  j["linear"] = Json{{"weights", std::move(weights)},
                     {"bias", vector_to_json(m.linear.bias)},
                     {"radius", m.linear.radius}};
  return j;
}

ClassifierModel classifier_model_from_json(const Json& j) {
  if (j.at("schema").get<std::string>() != kPipelineSchema)
    throw std::runtime_error("unexpected pipeline schema tag");
  ClassifierModel m;
  m.psi = j.at("psi").get<double>();
  m.tau = j.at("tau").get<double>();
  const auto solver = parse_solver(j.at("solver").get<std::string>());
  const auto mode = parse_mode(j.at("mode").get<std::string>());
  if (!solver || !mode) throw std::runtime_error("unknown solver or mode name");
  m.solver = *solver;
  m.mode = *mode;
  m.classifier_radius = j.at("classifier_radius").get<double>();
  m.scaler.mins = vector_from_json(j.at("scaler").at("min"));
  m.scaler.maxs = vector_from_json(j.at("scaler").at("max"));
  m.label_names = j.at("labels").get<std::vector<std::string>>();
  for (const Json& gm : j.at("class_models"))
    m.class_models.push_back(generator_model_from_json(gm));
  const Json& lin = j.at("linear");
  const Json& weights = lin.at("weights");
  const Index rows = static_cast<Index>(weights.size());
  const Index cols = rows > 0 ? static_cast<Index>(weights[0].size()) : 0;
  m.linear.W.resize(rows, cols);
  for (Index c = 0; c < rows; ++c) {
    if (static_cast<Index>(weights[static_cast<std::size_t>(c)].size()) != cols)
      throw std::runtime_error("ragged weight matrix");
    m.linear.W.row(c) = vector_from_json(weights[static_cast<std::size_t>(c)]).transpose();
  }
  m.linear.bias = vector_from_json(lin.at("bias"));
  if (m.linear.bias.size() != rows) throw std::runtime_error("bias length does not match weights");
  m.linear.radius = lin.at("radius").get<double>();
  return m;
}

Json parse_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("model parse error: ") + e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open model file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write model file: " + path);
  out << text << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace

std::string serialize(const GeneratorModel& model) { return generator_model_to_json(model).dump(2); }
std::string serialize(const ClassifierModel& model) { return classifier_model_to_json(model).dump(2); }

GeneratorModel deserialize_generator_model(const std::string& text) {
  try {
    return generator_model_from_json(parse_text(text));
  } catch (const Json::exception& e) {
    throw std::runtime_error(std::string("malformed model: ") + e.what());
  }
}

ClassifierModel deserialize_classifier_model(const std::string& text) {
  try {
    return classifier_model_from_json(parse_text(text));
  } catch (const Json::exception& e) {
    throw std::runtime_error(std::string("malformed model: ") + e.what());
  }
}

void save_model(const GeneratorModel& model, const std::string& path) {
  write_file(path, serialize(model));
}
void save_model(const ClassifierModel& model, const std::string& path) {
  write_file(path, serialize(model));
}

GeneratorModel load_generator_model(const std::string& path) {
  return deserialize_generator_model(read_file(path));
}
ClassifierModel load_classifier_model(const std::string& path) {
  return deserialize_classifier_model(read_file(path));
}

}  // namespace vanish
