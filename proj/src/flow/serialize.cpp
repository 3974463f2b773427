#include "snl/flow/serialize.hpp"

#include <fstream>
#include <stdexcept>

namespace snl::flow {

namespace {

constexpr const char* kFormat = "snl.conditional_maf";
constexpr int kVersion = 1;

nlohmann::ordered_json matrix_json(const Matrix& m) {
  nlohmann::ordered_json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  // column-major
  j["data"] = std::vector<double>(m.data(), m.data() + m.size());
  return j;
}

Matrix matrix_from(const nlohmann::ordered_json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(data.size()) != rows * cols) throw std::runtime_error("flow json: matrix size mismatch");
  return Eigen::Map<const Matrix>(data.data(), rows, cols);
}

}  // namespace

nlohmann::ordered_json to_json(const ConditionalMaf& flow) {
  const auto& c = flow.config();
  nlohmann::ordered_json doc;
  doc["format"] = kFormat;
  doc["version"] = kVersion;
  doc["data_dim"] = c.data_dim;
  doc["cond_dim"] = c.cond_dim;
  doc["n_layers"] = c.n_layers;
  doc["hidden_sizes"] = c.hidden_sizes;
  doc["batch_norm"] = c.batch_norm;
  doc["bn_momentum"] = c.bn_momentum;
  doc["bn_eps"] = c.bn_eps;
  doc["alpha_bound"] = c.alpha_bound;
  doc["conditioner_shift"] = matrix_json(flow.conditioner_shift());
  doc["conditioner_scale"] = matrix_json(flow.conditioner_scale());

  nlohmann::ordered_json layers = nlohmann::ordered_json::array();
  for (const auto& made : flow.made_layers()) {
    nlohmann::ordered_json layer;
    layer["ordering"] = made.masks().input_degrees;
    nlohmann::ordered_json params = nlohmann::ordered_json::array();
    for (const Matrix* p : made.parameters()) params.push_back(matrix_json(*p));
    layer["parameters"] = std::move(params);
    layers.push_back(std::move(layer));
  }
  doc["made_layers"] = std::move(layers);

  nlohmann::ordered_json norms = nlohmann::ordered_json::array();
  for (const auto& bn : flow.batch_norms()) {
    nlohmann::ordered_json n;
    n["log_gamma"] = matrix_json(*bn.parameters()[0]);
    n["beta"] = matrix_json(*bn.parameters()[1]);
    n["running_mean"] = matrix_json(bn.running_mean());
    n["running_var"] = matrix_json(bn.running_var());
    norms.push_back(std::move(n));
  }
  doc["batch_norms"] = std::move(norms);
  return doc;
}

ConditionalMaf flow_from_json(const nlohmann::ordered_json& doc) {
  if (doc.at("format").get<std::string>() != kFormat) throw std::runtime_error("flow json: unknown format");
  if (doc.at("version").get<int>() != kVersion) throw std::runtime_error("flow json: unsupported version");
  FlowConfig c;
  c.data_dim = doc.at("data_dim").get<int>();
  c.cond_dim = doc.at("cond_dim").get<int>();
  c.n_layers = doc.at("n_layers").get<int>();
  c.hidden_sizes = doc.at("hidden_sizes").get<std::vector<int>>();
  c.batch_norm = doc.at("batch_norm").get<bool>();
  c.bn_momentum = doc.at("bn_momentum").get<double>();
  c.bn_eps = doc.at("bn_eps").get<double>();
  c.alpha_bound = doc.at("alpha_bound").get<double>();

  ConditionalMaf flow(c, 0);
  if (doc.contains("conditioner_shift"))
    flow.set_conditioner_transform(matrix_from(doc.at("conditioner_shift")).col(0),
                                   matrix_from(doc.at("conditioner_scale")).col(0));
  const auto& layers = doc.at("made_layers");
  if (layers.size() != flow.made_layers().size()) throw std::runtime_error("flow json: layer count mismatch");
  for (std::size_t k = 0; k < layers.size(); ++k) {
    auto& made = flow.made_layers()[k];
    const auto ordering = layers[k].at("ordering").get<std::vector<int>>();
    if (ordering != made.masks().input_degrees) {
      made = MadeLayer(build_masks(c.data_dim, c.hidden_sizes, c.cond_dim, ordering), c.alpha_bound);
    }
    const auto params = made.parameters();
    const auto& saved = layers[k].at("parameters");
    if (saved.size() != params.size()) throw std::runtime_error("flow json: parameter block count mismatch");
    for (std::size_t i = 0; i < params.size(); ++i) {
      Matrix m = matrix_from(saved[i]);
      if (m.rows() != params[i]->rows() || m.cols() != params[i]->cols())
        throw std::runtime_error("flow json: parameter block shape mismatch");
      *params[i] = std::move(m);
    }
  }
  const auto& norms = doc.at("batch_norms");
  if (norms.size() != flow.batch_norms().size()) throw std::runtime_error("flow json: batch norm count mismatch");
  for (std::size_t k = 0; k < norms.size(); ++k) {
    auto& bn = flow.batch_norms()[k];
    *bn.parameters()[0] = matrix_from(norms[k].at("log_gamma"));
    *bn.parameters()[1] = matrix_from(norms[k].at("beta"));
    bn.set_running(matrix_from(norms[k].at("running_mean")).col(0), matrix_from(norms[k].at("running_var")).col(0));
  }
  return flow;
}

void save_flow(const ConditionalMaf& flow, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("save_flow: cannot open " + path.string());
  os << to_json(flow).dump() << '\n';
}

ConditionalMaf load_flow(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("load_flow: cannot open " + path.string());
  return flow_from_json(nlohmann::ordered_json::parse(is));
}

}  // namespace snl::flow
