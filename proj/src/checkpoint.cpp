#include "duallstm/checkpoint.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace duallstm {

namespace {

void write_tensors(std::ostream& out, const std::string& prefix, const LstmNetwork& net) {
  char buf[64];
  for (const ConstTensorRef& t : named_tensors(net)) {
    out << "TENSOR " << prefix << t.name << " " << t.rows << " " << t.cols << "\n";
    // Row-major emission; storage is column-major.
    for (Eigen::Index r = 0; r < t.rows; ++r) {
      for (Eigen::Index c = 0; c < t.cols; ++c) {
        std::snprintf(buf, sizeof(buf), "%.17g", t.data[c * t.rows + r]);
        out << buf << (c + 1 < t.cols ? " " : "");
      }
      out << "\n";
    }
  }
}

void read_tensor_block(std::istream& in, const TensorRef& t, Eigen::Index rows,
                       Eigen::Index cols, const std::string& name) {
  if (t.rows != rows || t.cols != cols) {
    throw std::runtime_error("checkpoint: tensor " + name + " has shape " +
                             std::to_string(rows) + "x" + std::to_string(cols) +
                             ", expected " + std::to_string(t.rows) + "x" +
                             std::to_string(t.cols));
  }
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      double v;
      if (!(in >> v)) throw std::runtime_error("checkpoint: truncated tensor " + name);
      t.data[c * rows + r] = v;
    }
  }
}

}  // namespace

void save_checkpoint(std::ostream& out, const ModelBundle& bundle) {
  out << kCheckpointMagic << "\n";
  write_tensors(out, "intent.", bundle.intent.net);
  write_tensors(out, "traj.", bundle.traj.net);
  out << "HYPER\n";
  for (const auto& [k, v] : bundle.hyper) out << k << "=" << v << "\n";
}

void save_checkpoint(const std::filesystem::path& path, const ModelBundle& bundle) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path.string());
  save_checkpoint(out, bundle);
}

ModelBundle load_checkpoint(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCheckpointMagic) {
    throw std::runtime_error("checkpoint: version mismatch (expected '" +
                             std::string(kCheckpointMagic) + "')");
  }

  ModelBundle bundle;
  bundle.intent.net = LstmNetwork{LstmParams::zeros(kFeatureDim, kIntentionHidden),
                                  DenseParams::zeros(kIntentionHidden, kNumIntentionClasses),
                                  HeadKind::kClassification};
  bundle.traj.net = LstmNetwork{LstmParams::zeros(kFeatureDim, kTrajectoryHidden),
                                DenseParams::zeros(kTrajectoryHidden, 2 * kHorizonSteps),
                                HeadKind::kRegression};

  std::map<std::string, TensorRef> by_name;
  for (const TensorRef& t : named_tensors(bundle.intent.net)) by_name.emplace("intent." + t.name, t);
  for (const TensorRef& t : named_tensors(bundle.traj.net)) by_name.emplace("traj." + t.name, t);

  std::size_t tensors_seen = 0;
  std::string tok;
  while (in >> tok) {
    if (tok == "TENSOR") {
      std::string name;
      Eigen::Index rows, cols;
      if (!(in >> name >> rows >> cols)) {
        throw std::runtime_error("checkpoint: malformed TENSOR header");
      }
      const auto it = by_name.find(name);
      if (it == by_name.end()) throw std::runtime_error("checkpoint: unknown tensor " + name);
      read_tensor_block(in, it->second, rows, cols, name);
      ++tensors_seen;
    } else if (tok == "HYPER") {
      std::string rest;
      std::getline(in, rest);  // finish the HYPER line
      bundle.hyper = parse_key_values(in);
      break;
    } else {
      throw std::runtime_error("checkpoint: unexpected token '" + tok + "'");
    }
  }
  if (tensors_seen != by_name.size()) {
    throw std::runtime_error("checkpoint: expected " + std::to_string(by_name.size()) +
                             " tensors, found " + std::to_string(tensors_seen));
  }
  bundle.intent.net.validate();
  bundle.traj.net.validate();
  return bundle;
}

ModelBundle load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path.string());
  return load_checkpoint(in);
}

}  // namespace duallstm
