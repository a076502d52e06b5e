#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "pixelcode/coding.hpp"
#include "pixelcode/errors.hpp"
#include "pixelcode/hmsm.hpp"
#include "pixelcode/rng.hpp"
#include "pixelcode/textio.hpp"

namespace pixelcode {

/// Head training knobs. pool_rows/pool_cols give the average-pool block; 0
/// collapses that axis entirely. The default keeps per-row means, which for
/// beamspace features is a strong, cheap summary of the channel.
struct HeadHyper {
  int hidden = 192;
  int epochs = 150;
  double learning_rate = 1e-3;
  int batch_size = 64;
  int pool_rows = 1;
  int pool_cols = 0;
  bool quadratic = true;  // expand pooled features with pairwise invariants
  std::uint64_t seed = 1;

  void validate() const {
    if (hidden < 1) throw ValidationError("hidden width must be >= 1");
    if (epochs < 1) throw ValidationError("epochs must be >= 1");
    if (!(learning_rate > 0.0)) throw ValidationError("learning rate must be positive");
    if (batch_size < 1) throw ValidationError("batch size must be >= 1");
    if (pool_rows < 0 || pool_cols < 0) throw ValidationError("pool factors must be >= 0");
  }
};

/// The pooled first two blocks are Re/Im of a complex summary z of the
/// channel. The beamspace objectives are built from |pattern^T z|^2 terms,
/// which are linear in the outer products z_i conj(z_j), so the classifier
/// sees those invariants directly: per-coder scores become (piecewise)
/// linear in the inputs, and the nuisance global phase of the channel drops
/// out. The third block rides along unchanged (it carries the SNR scaling
/// for MIMO features).
inline Eigen::VectorXd expand_quadratic(const Eigen::VectorXd& pooled) {
  const Eigen::Index b = pooled.size() / 3;
  const auto re = pooled.segment(0, b);
  const auto im = pooled.segment(b, b);
  Eigen::VectorXd out(b * b + b);
  Eigen::Index at = 0;
  for (Eigen::Index i = 0; i < b; ++i) out(at++) = re(i) * re(i) + im(i) * im(i);
  for (Eigen::Index i = 0; i < b; ++i)
    for (Eigen::Index j = i + 1; j < b; ++j) {
      out(at++) = re(i) * re(j) + im(i) * im(j);  // Re z_i conj(z_j)
      out(at++) = im(i) * re(j) - re(i) * im(j);  // Im z_i conj(z_j)
    }
  out.segment(at, b) = pooled.segment(2 * b, b);
  return out;
}

/// Block-average pooling of the three feature maps, flattened row-major into
/// one vector (map1 block, then map2, then map3).
inline Eigen::VectorXd pool_features(const FeatureTensor& f, int pool_rows, int pool_cols) {
  const auto n = f.map1.rows();
  const Eigen::Index pr = pool_rows == 0 ? n : pool_rows;
  const Eigen::Index pc = pool_cols == 0 ? n : pool_cols;
  if (pr < 1 || pc < 1 || n % pr != 0 || n % pc != 0)
    throw ValidationError("pool factors must divide the 2K feature dimension " +
                          std::to_string(n));
  const Eigen::Index rows = n / pr;
  const Eigen::Index cols = n / pc;
  Eigen::VectorXd out(3 * rows * cols);
  Eigen::Index at = 0;
  const double inv = 1.0 / static_cast<double>(pr * pc);
  for (const Eigen::MatrixXd* map : {&f.map1, &f.map2, &f.map3}) {
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c)
        out(at++) = map->block(r * pr, c * pc, pr, pc).sum() * inv;
  }
  return out;
}

/// Pool + optional quadratic expansion: the classifier input pipeline shared
/// by training and inference.
inline Eigen::VectorXd head_input(const FeatureTensor& f, const HeadHyper& hyper) {
  Eigen::VectorXd pooled = pool_features(f, hyper.pool_rows, hyper.pool_cols);
  if (!hyper.quadratic) return pooled;
  const Eigen::Index b = pooled.size() / 3;
  if (b * b + b > 8192)
    throw ValidationError("quadratic expansion would give " + std::to_string(b * b + b) +
                          " features; pool harder or disable it");
  return expand_quadratic(pooled);
}

/// Single-hidden-layer ReLU softmax classifier trained with Adam.
struct MlpClassifier {
  Eigen::MatrixXd w1;  // hidden x input
  Eigen::VectorXd b1;
  Eigen::MatrixXd w2;  // classes x hidden
  Eigen::VectorXd b2;
  std::vector<double> epoch_loss;

  Eigen::VectorXd logits(const Eigen::VectorXd& x) const {
    const Eigen::VectorXd a1 = (w1 * x + b1).cwiseMax(0.0);
    return w2 * a1 + b2;
  }

  int predict(const Eigen::VectorXd& x) const {
    const Eigen::VectorXd z = logits(x);
    Eigen::Index best = 0;
    z.maxCoeff(&best);
    return static_cast<int>(best);
  }
};

namespace detail {

struct AdamState {
  Eigen::MatrixXd m, v;
  explicit AdamState(Eigen::Index rows, Eigen::Index cols)
      : m(Eigen::MatrixXd::Zero(rows, cols)), v(Eigen::MatrixXd::Zero(rows, cols)) {}

  void step(Eigen::Ref<Eigen::MatrixXd> param, const Eigen::MatrixXd& grad, double lr,
            double bias1, double bias2) {
    m = 0.9 * m + 0.1 * grad;
    v = 0.999 * v + 0.001 * grad.cwiseProduct(grad);
    param -= lr * (m / bias1)
                 .cwiseQuotient(((v / bias2).cwiseSqrt().array() + 1e-8).matrix());
  }
};

}  // namespace detail

/// Cross-entropy training of one element classifier. x holds one sample per
/// row; labels are class indices below `classes`. Deterministic per seed.
inline MlpClassifier train_mlp(const Eigen::MatrixXd& x, const std::vector<int>& labels,
                               int classes, const HeadHyper& hyper, std::uint64_t seed) {
  hyper.validate();
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  if (n < 1) throw ValidationError("training set is empty");
  if (static_cast<Eigen::Index>(labels.size()) != n)
    throw ValidationError("label count does not match sample count");
  for (const int y : labels)
    if (y < 0 || y >= classes) throw ValidationError("label outside class range");

  Rng rng(seed);
  MlpClassifier net;
  const int h = hyper.hidden;
  const auto init = [&rng](Eigen::MatrixXd& w, Eigen::Index rows, Eigen::Index cols) {
    w.resize(rows, cols);
    const double scale = std::sqrt(2.0 / static_cast<double>(cols));
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) w(i, j) = scale * rng.gaussian();
  };
  init(net.w1, h, d);
  net.b1 = Eigen::VectorXd::Zero(h);
  init(net.w2, classes, h);
  net.b2 = Eigen::VectorXd::Zero(classes);

  detail::AdamState aw1(h, d), ab1(h, 1), aw2(classes, h), ab2(classes, 1);
  std::vector<std::size_t> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), std::size_t{0});
  long long step = 0;

  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    rng.shuffle(order);
    // Cosine decay to a tenth of the base rate by the final epoch.
    const double progress = hyper.epochs > 1
                                ? static_cast<double>(epoch) / static_cast<double>(hyper.epochs - 1)
                                : 0.0;
    const double lr =
        hyper.learning_rate * (0.55 + 0.45 * std::cos(3.14159265358979324 * progress));
    double loss_sum = 0.0;
    for (Eigen::Index at = 0; at < n; at += hyper.batch_size) {
      const Eigen::Index bsz = std::min<Eigen::Index>(hyper.batch_size, n - at);
      Eigen::MatrixXd xb(bsz, d);
      for (Eigen::Index r = 0; r < bsz; ++r)
        xb.row(r) = x.row(static_cast<Eigen::Index>(order[static_cast<std::size_t>(at + r)]));

      const Eigen::MatrixXd z1 =
          (xb * net.w1.transpose()).rowwise() + net.b1.transpose();
      const Eigen::MatrixXd a1 = z1.cwiseMax(0.0);
      Eigen::MatrixXd logits =
          (a1 * net.w2.transpose()).rowwise() + net.b2.transpose();

      // Stable softmax + cross-entropy; grad = (softmax - onehot) / batch.
      const Eigen::VectorXd rowmax = logits.rowwise().maxCoeff();
      logits.colwise() -= rowmax;
      const Eigen::MatrixXd expz = logits.array().exp();
      const Eigen::VectorXd denom = expz.rowwise().sum();
      Eigen::MatrixXd grad = expz.array().colwise() / denom.array();
      for (Eigen::Index r = 0; r < bsz; ++r) {
        const int y = labels[order[static_cast<std::size_t>(at + r)]];
        loss_sum += std::log(denom(r)) - logits(r, y);
        grad(r, y) -= 1.0;
      }
      grad /= static_cast<double>(bsz);

      const Eigen::MatrixXd gw2 = grad.transpose() * a1;
      const Eigen::VectorXd gb2 = grad.colwise().sum();
      Eigen::MatrixXd dz1 = grad * net.w2;
      dz1 = dz1.cwiseProduct((z1.array() > 0.0).cast<double>().matrix());
      const Eigen::MatrixXd gw1 = dz1.transpose() * xb;
      const Eigen::VectorXd gb1 = dz1.colwise().sum();

      ++step;
      const double bias1 = 1.0 - std::pow(0.9, static_cast<double>(step));
      const double bias2 = 1.0 - std::pow(0.999, static_cast<double>(step));
      aw1.step(net.w1, gw1, lr, bias1, bias2);
      ab1.step(net.b1, gb1, lr, bias1, bias2);
      aw2.step(net.w2, gw2, lr, bias1, bias2);
      ab2.step(net.b2, gb2, lr, bias1, bias2);
    }
    const double epoch_mean = loss_sum / static_cast<double>(n);
    if (!std::isfinite(epoch_mean))
      throw DivergenceError("training loss became non-finite at epoch " +
                            std::to_string(epoch));
    net.epoch_loss.push_back(epoch_mean);
  }
  return net;
}

/// Trained multi-class head: one classifier per antenna-map element, shared
/// pooled/standardized features, one coding scheme.
class HeadModel : public Predictor {
public:
  CodingScheme head_scheme;
  InstanceKind kind = InstanceKind::Siso;
  int k_samples = 0;
  std::vector<int> antenna_qs;  // per antenna, flattening order
  HeadHyper hyper;
  Eigen::VectorXd feature_mean, feature_std;
  std::vector<MlpClassifier> elements;

  CodingScheme scheme() const override { return head_scheme; }

  int elements_for_antenna(std::size_t a) const {
    const int m = head_scheme.group_bits;
    return (antenna_qs[a] + m - 1) / m;
  }

  std::size_t total_elements() const {
    std::size_t total = 0;
    for (std::size_t a = 0; a < antenna_qs.size(); ++a)
      total += static_cast<std::size_t>(elements_for_antenna(a));
    return total;
  }

  Eigen::VectorXd prepare(const FeatureTensor& features) const {
    Eigen::VectorXd x = head_input(features, hyper);
    if (x.size() != feature_mean.size())
      throw InvariantViolation("feature dimension does not match the trained head");
    return (x - feature_mean).cwiseQuotient(feature_std);
  }

  std::vector<AntennaMap> predict(const FeatureTensor& features) const override {
    const Eigen::VectorXd x = prepare(features);
    std::vector<AntennaMap> maps;
    maps.reserve(antenna_qs.size());
    std::size_t e = 0;
    for (std::size_t a = 0; a < antenna_qs.size(); ++a) {
      AntennaMap map;
      map.scheme = head_scheme;
      map.original_length = static_cast<std::size_t>(antenna_qs[a]);
      const int count = elements_for_antenna(a);
      map.elements.reserve(static_cast<std::size_t>(count));
      for (int i = 0; i < count; ++i)
        map.elements.push_back(static_cast<std::uint32_t>(elements[e++].predict(x)));
      maps.push_back(std::move(map));
    }
    return maps;
  }
};

// --- model file ----------------------------------------------------------------

inline constexpr const char* kHeadMagic = "pixelcode-head";

inline void write_head(std::ostream& out, const HeadModel& m) {
  out << kHeadMagic << " v1\n";
  out << "scheme " << to_string(m.head_scheme.variant) << " " << m.head_scheme.group_bits
      << "\n";
  out << "kind " << to_string(m.kind) << "\n";
  out << "k_samples " << m.k_samples << "\n";
  out << "antenna_qs";
  for (const int q : m.antenna_qs) out << " " << q;
  out << "\n";
  out << "hidden " << m.hyper.hidden << "\n";
  out << "epochs " << m.hyper.epochs << "\n";
  out << "learning_rate " << fmt_double(m.hyper.learning_rate) << "\n";
  out << "batch_size " << m.hyper.batch_size << "\n";
  out << "pool " << m.hyper.pool_rows << " " << m.hyper.pool_cols << "\n";
  out << "quadratic " << (m.hyper.quadratic ? 1 : 0) << "\n";
  out << "seed " << m.hyper.seed << "\n";
  out << "input_dim " << m.feature_mean.size() << "\n";
  const auto write_vector = [&out](const char* tag, const Eigen::VectorXd& v) {
    out << tag;
    for (Eigen::Index i = 0; i < v.size(); ++i) out << " " << fmt_double(v(i));
    out << "\n";
  };
  const auto write_matrix = [&out](const char* tag, const Eigen::MatrixXd& w) {
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      out << tag;
      for (Eigen::Index c = 0; c < w.cols(); ++c) out << " " << fmt_double(w(r, c));
      out << "\n";
    }
  };
  write_vector("feature_mean", m.feature_mean);
  write_vector("feature_std", m.feature_std);
  out << "elements " << m.elements.size() << "\n";
  for (std::size_t e = 0; e < m.elements.size(); ++e) {
    const MlpClassifier& net = m.elements[e];
    out << "element " << e << " hidden " << net.w1.rows() << " classes " << net.w2.rows()
        << "\n";
    write_matrix("w1", net.w1);
    write_vector("b1", net.b1);
    write_matrix("w2", net.w2);
    write_vector("b2", net.b2);
    Eigen::VectorXd losses(static_cast<Eigen::Index>(net.epoch_loss.size()));
    for (Eigen::Index i = 0; i < losses.size(); ++i) losses(i) = net.epoch_loss[static_cast<std::size_t>(i)];
    write_vector("losses", losses);
  }
  out << "end\n";
}

inline void export_head(const HeadModel& m, const std::string& path) {
  auto out = open_output(path);
  write_head(out, m);
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline HeadModel read_head(std::istream& in, const std::string& name) {
  LineReader r(in, name);
  const auto head = r.next();
  if (head[0] != kHeadMagic || head.size() < 2 || head[1] != "v1")
    throw ParseError(r.context() + ": not a " + std::string(kHeadMagic) + " v1 file");
  HeadModel m;
  const auto scheme = r.expect("scheme", 2);
  m.head_scheme = CodingScheme(scheme_variant_from_string(scheme[1]),
                               static_cast<int>(parse_int(scheme[2], r.context())));
  m.kind = instance_kind_from_string(r.expect("kind", 1)[1]);
  m.k_samples = static_cast<int>(r.expect_int("k_samples"));
  const auto qs = r.expect("antenna_qs", 1);
  for (std::size_t i = 1; i < qs.size(); ++i)
    m.antenna_qs.push_back(static_cast<int>(parse_int(qs[i], r.context())));
  m.hyper.hidden = static_cast<int>(r.expect_int("hidden"));
  m.hyper.epochs = static_cast<int>(r.expect_int("epochs"));
  m.hyper.learning_rate = r.expect_double("learning_rate");
  m.hyper.batch_size = static_cast<int>(r.expect_int("batch_size"));
  const auto pool = r.expect("pool", 2);
  m.hyper.pool_rows = static_cast<int>(parse_int(pool[1], r.context()));
  m.hyper.pool_cols = static_cast<int>(parse_int(pool[2], r.context()));
  m.hyper.quadratic = r.expect_int("quadratic") != 0;
  m.hyper.seed = static_cast<std::uint64_t>(r.expect_uint("seed"));
  const auto input_dim = r.expect_int("input_dim");

  const auto read_vector = [&r](const char* tag, Eigen::Index n, Eigen::VectorXd& v) {
    const auto toks = r.expect(tag, static_cast<std::size_t>(n));
    if (toks.size() != static_cast<std::size_t>(n) + 1)
      throw ParseError(r.context() + ": expected " + std::to_string(n) + " values");
    v.resize(n);
    for (Eigen::Index i = 0; i < n; ++i)
      v(i) = parse_double(toks[static_cast<std::size_t>(i + 1)], r.context());
  };
  const auto read_matrix = [&](const char* tag, Eigen::Index rows, Eigen::Index cols,
                               Eigen::MatrixXd& w) {
    w.resize(rows, cols);
    Eigen::VectorXd row;
    for (Eigen::Index i = 0; i < rows; ++i) {
      read_vector(tag, cols, row);
      w.row(i) = row.transpose();
    }
  };

  read_vector("feature_mean", input_dim, m.feature_mean);
  read_vector("feature_std", input_dim, m.feature_std);
  const auto n_elements = r.expect_int("elements");
  if (n_elements != static_cast<long long>(m.total_elements()))
    throw InvariantViolation(name + ": element count does not match antenna_qs and scheme");
  const int classes = m.head_scheme.num_classes();
  for (long long e = 0; e < n_elements; ++e) {
    const auto eh = r.expect("element", 5);
    if (parse_int(eh[1], r.context()) != e)
      throw ParseError(r.context() + ": elements out of order");
    const auto hidden = parse_int(eh[3], r.context());
    const auto cls = parse_int(eh[5], r.context());
    if (cls != classes) throw InvariantViolation(name + ": class count does not match scheme");
    MlpClassifier net;
    read_matrix("w1", hidden, input_dim, net.w1);
    read_vector("b1", hidden, net.b1);
    read_matrix("w2", cls, hidden, net.w2);
    read_vector("b2", cls, net.b2);
    auto losses = r.expect("losses");
    for (std::size_t i = 1; i < losses.size(); ++i)
      net.epoch_loss.push_back(parse_double(losses[i], r.context()));
    m.elements.push_back(std::move(net));
  }
  r.expect("end");
  return m;
}

inline HeadModel import_head(const std::string& path) {
  auto in = open_input(path);
  return read_head(in, path);
}

}  // namespace pixelcode
