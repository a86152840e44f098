#include "hfa/random.hpp"

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>
#include <boost/random/uniform_int_distribution.hpp>

namespace hfa {

std::uint64_t draw_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

double standard_normal(Engine& engine) {
  boost::random::normal_distribution<double> dist(0.0, 1.0);
  return dist(engine);
}

std::size_t uniform_index(Engine& engine, std::size_t upper) {
  boost::random::uniform_int_distribution<std::size_t> dist(0, upper - 1);
  return dist(engine);
}

double uniform01(Engine& engine) {
  boost::random::uniform_01<double> dist;
  return dist(engine);
}

Eigen::VectorXd normal_vector(Engine& engine, Eigen::Index n, double sd) {
  boost::random::normal_distribution<double> dist(0.0, sd);
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) out(i) = dist(engine);
  return out;
}

Eigen::VectorXd permuted(const Eigen::VectorXd& v, Engine& engine) {
  Eigen::VectorXd out = v;
  for (Eigen::Index i = out.size() - 1; i > 0; --i) {
    const auto j = static_cast<Eigen::Index>(uniform_index(engine, static_cast<std::size_t>(i) + 1));
    std::swap(out(i), out(j));
  }
  return out;
}

Eigen::VectorXd resampled(const Eigen::VectorXd& v, Engine& engine) {
  Eigen::VectorXd out(v.size());
  const auto n = static_cast<std::size_t>(v.size());
  for (Eigen::Index i = 0; i < out.size(); ++i) out(i) = v(static_cast<Eigen::Index>(uniform_index(engine, n)));
  return out;
}

}  // namespace hfa
