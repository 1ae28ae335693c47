#include "unifx/gaussian.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "unifx/error.hpp"

namespace unifx {

namespace {

double scale_of(const Eigen::MatrixXd& m) {
  return m.size() == 0 ? 1.0 : std::max(1.0, m.cwiseAbs().maxCoeff());
}

double centered_moment(std::vector<int>& idx, std::size_t used_mask_bits, const Eigen::MatrixXd& c) {
  // Sum over perfect matchings of the still-unused positions.
  const std::size_t n = idx.size();
  std::size_t first = 0;
  while (first < n && ((used_mask_bits >> first) & 1u)) ++first;
  if (first == n) return 1.0;
  double total = 0.0;
  for (std::size_t j = first + 1; j < n; ++j) {
    if ((used_mask_bits >> j) & 1u) continue;
    const double cov = c(idx[first], idx[j]);
    if (cov == 0.0) continue;
    total += cov * centered_moment(idx, used_mask_bits | (std::size_t{1} << first) | (std::size_t{1} << j), c);
  }
  return total;
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

bool parse_double(std::string_view cell, double& out) {
  if (cell.empty()) return false;
  if (cell.front() == '+') cell.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
  return ec == std::errc() && ptr == cell.data() + cell.size() && std::isfinite(out);
}

}  // namespace

GaussianSpec GaussianSpec::create(Eigen::VectorXd mu, Eigen::MatrixXd sigma) {
  const auto d = mu.size();
  if (sigma.rows() != d || sigma.cols() != d) {
    throw InvalidArgument("covariance must be " + std::to_string(d) + "x" + std::to_string(d) +
                          ", got " + std::to_string(sigma.rows()) + "x" + std::to_string(sigma.cols()));
  }
  if (!mu.allFinite() || !sigma.allFinite()) throw InvalidArgument("Gaussian parameters must be finite");
  const double asym = d == 0 ? 0.0 : (sigma - sigma.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale_of(sigma)) {
    throw InvalidArgument("covariance is not symmetric (max asymmetry " + std::to_string(asym) + ")");
  }
  cholesky_factor(sigma);
  return GaussianSpec{std::move(mu), std::move(sigma)};
}

GaussianSpec GaussianSpec::equicorrelated(int d, double rho, double mean) {
  if (d < 1) throw InvalidArgument("dimension must be at least 1");
  if (!(rho <= 1.0) || (d > 1 && !(rho > -1.0 / (d - 1)))) {
    throw InvalidArgument("equicorrelation rho=" + std::to_string(rho) + " outside (-1/(d-1), 1]");
  }
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Constant(d, d, rho);
  sigma.diagonal().setOnes();
  return create(Eigen::VectorXd::Constant(d, mean), std::move(sigma));
}

GaussianSpec GaussianSpec::standard(int d) {
  return create(Eigen::VectorXd::Zero(d), Eigen::MatrixXd::Identity(d, d));
}

bool GaussianSpec::is_diagonal() const {
  for (int i = 0; i < dim(); ++i) {
    for (int j = 0; j < dim(); ++j) {
      if (i != j && sigma(i, j) != 0.0) return false;
    }
  }
  return true;
}

Eigen::MatrixXd cholesky_factor(const Eigen::MatrixXd& sigma) {
  if (sigma.rows() != sigma.cols()) throw InvalidArgument("Cholesky factor of a non-square matrix");
  const Eigen::Index n = sigma.rows();
  const double tol = kCholeskyTolerance * (n == 0 ? 1.0 : std::max(1.0, sigma.diagonal().maxCoeff()));
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double pivot = sigma(j, j) - l.row(j).head(j).squaredNorm();
    if (pivot < -tol) {
      throw NumericError("matrix is not a covariance: Cholesky pivot " + std::to_string(j + 1) + " is " +
                         std::to_string(pivot));
    }
    if (pivot <= tol) continue;  // singular direction; column stays zero
    const double ljj = std::sqrt(pivot);
    l(j, j) = ljj;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      l(i, j) = (sigma(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / ljj;
    }
  }
  return l;
}

Eigen::MatrixXd sample(const GaussianSpec& spec, std::size_t n, std::uint64_t seed, StreamPurpose purpose,
                       std::uint64_t stream) {
  const int d = spec.dim();
  const Eigen::MatrixXd l = cholesky_factor(spec.sigma);
  const CounterRng rng(seed, purpose, stream);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(n), d);
  Eigen::VectorXd z(d);
  for (std::size_t k = 0; k < n; ++k) {
    for (int j = 0; j < d; ++j) z(j) = rng.normal(k * static_cast<std::uint64_t>(d) + static_cast<std::uint64_t>(j));
    out.row(static_cast<Eigen::Index>(k)) = (spec.mu + l * z).transpose();
  }
  return out;
}

ConditionalGaussian conditional(const GaussianSpec& spec, Coalition s, std::span<const double> x_s,
                                bool allow_pseudo_inverse) {
  const int d = spec.dim();
  if (s.dim() != d) throw InvalidArgument("conditioning coalition dimension does not match the distribution");
  const std::vector<int> in = s.features();
  const std::vector<int> out = s.complement().features();
  if (x_s.size() != in.size()) {
    throw InvalidArgument("conditioning values: expected " + std::to_string(in.size()) + ", got " +
                          std::to_string(x_s.size()));
  }
  const auto ns = static_cast<Eigen::Index>(in.size());
  const auto nf = static_cast<Eigen::Index>(out.size());

  ConditionalGaussian result;
  result.free_features = out;
  Eigen::VectorXd mu_f(nf);
  Eigen::MatrixXd sig_ff(nf, nf);
  for (Eigen::Index a = 0; a < nf; ++a) {
    mu_f(a) = spec.mu(out[a] - 1);
    for (Eigen::Index b = 0; b < nf; ++b) sig_ff(a, b) = spec.sigma(out[a] - 1, out[b] - 1);
  }
  if (ns == 0) {
    result.spec = GaussianSpec{std::move(mu_f), std::move(sig_ff)};
    return result;
  }

  Eigen::MatrixXd sig_ss(ns, ns);
  Eigen::MatrixXd sig_fs(nf, ns);
  Eigen::VectorXd dev(ns);
  for (Eigen::Index a = 0; a < ns; ++a) {
    dev(a) = x_s[static_cast<std::size_t>(a)] - spec.mu(in[a] - 1);
    for (Eigen::Index b = 0; b < ns; ++b) sig_ss(a, b) = spec.sigma(in[a] - 1, in[b] - 1);
    for (Eigen::Index b = 0; b < nf; ++b) sig_fs(b, a) = spec.sigma(out[b] - 1, in[a] - 1);
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sig_ss);
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  const double cut = kCholeskyTolerance * std::max(1.0, lambda.cwiseAbs().maxCoeff());
  Eigen::MatrixXd gain;  // Sigma_fs Sigma_ss^{-1}
  if (lambda.minCoeff() > cut) {
    gain = sig_ss.llt().solve(sig_fs.transpose()).transpose();
  } else {
    if (!allow_pseudo_inverse) {
      throw NumericError("conditioning block for {" + s.to_string() + "} is singular");
    }
    Eigen::VectorXd inv = lambda;
    for (Eigen::Index i = 0; i < inv.size(); ++i) inv(i) = lambda(i) > cut ? 1.0 / lambda(i) : 0.0;
    gain = sig_fs * eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
    result.pseudo_inverse = true;
  }
  Eigen::MatrixXd cov = sig_ff - gain * sig_fs.transpose();
  cov = 0.5 * (cov + cov.transpose());
  result.spec = GaussianSpec{mu_f + gain * dev, std::move(cov)};
  return result;
}

double gaussian_moment(const GaussianSpec& spec, std::span<const int> kappa) {
  const int d = spec.dim();
  if (static_cast<int>(kappa.size()) != d) {
    throw InvalidArgument("moment exponent vector has length " + std::to_string(kappa.size()) + ", expected " +
                          std::to_string(d));
  }
  int degree = 0;
  std::vector<int> vars;
  for (int i = 0; i < d; ++i) {
    if (kappa[static_cast<std::size_t>(i)] < 0) throw InvalidArgument("negative moment exponent");
    degree += kappa[static_cast<std::size_t>(i)];
    if (kappa[static_cast<std::size_t>(i)] > 0) vars.push_back(i);
  }
  if (degree > kMaxMomentDegree) {
    throw InvalidArgument("moment degree " + std::to_string(degree) + " exceeds the cap of " +
                          std::to_string(kMaxMomentDegree));
  }
  // Enumerate a_i in [0, kappa_i]: a_i centered factors, kappa_i - a_i mean factors.
  std::vector<int> a(vars.size(), 0);
  double total = 0.0;
  std::vector<int> idx;
  while (true) {
    double coef = 1.0;
    idx.clear();
    for (std::size_t v = 0; v < vars.size(); ++v) {
      const int i = vars[v];
      const int k = kappa[static_cast<std::size_t>(i)];
      coef *= binomial(k, a[v]) * std::pow(spec.mu(i), k - a[v]);
      for (int r = 0; r < a[v]; ++r) idx.push_back(i);
    }
    if (coef != 0.0 && idx.size() % 2 == 0) total += coef * centered_moment(idx, 0, spec.sigma);
    std::size_t v = 0;
    while (v < vars.size() && a[v] == kappa[static_cast<std::size_t>(vars[v])]) a[v++] = 0;
    if (v == vars.size()) break;
    ++a[v];
  }
  return total;
}

Dataset parse_dataset(std::string_view text, const std::string& source) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t nl = text.find('\n', start);
    lines.push_back(text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start));
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  if (lines.empty()) throw ParseError(source + ": empty file, header row required");

  const auto header = split_csv(lines.front());
  bool all_numeric = true;
  for (auto cell : header) {
    double v;
    if (!parse_double(cell, v)) all_numeric = false;
  }
  if (all_numeric) throw ParseError(source + ": missing header row (first row is numeric)");

  Dataset ds;
  for (auto cell : header) {
    if (cell.empty()) throw ParseError(source + ": empty column name in header");
    ds.column_names.emplace_back(cell);
  }
  const std::size_t ncols = header.size();
  const bool has_y = ds.column_names.back() == "y";
  const std::size_t nx = has_y ? ncols - 1 : ncols;
  if (nx == 0) throw ParseError(source + ": no feature columns");
  if (lines.size() < 2) throw ParseError(source + ": no data rows");

  const auto nrows = static_cast<Eigen::Index>(lines.size() - 1);
  ds.x.resize(nrows, static_cast<Eigen::Index>(nx));
  if (has_y) ds.y = Eigen::VectorXd(nrows);
  for (Eigen::Index r = 0; r < nrows; ++r) {
    const std::size_t line_no = static_cast<std::size_t>(r) + 2;
    const auto cells = split_csv(lines[static_cast<std::size_t>(r) + 1]);
    if (cells.size() != ncols) {
      throw ParseError(source + ": row " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                       " cells, expected " + std::to_string(ncols));
    }
    for (std::size_t c = 0; c < ncols; ++c) {
      double v;
      if (!parse_double(cells[c], v)) {
        throw ParseError(source + ": row " + std::to_string(line_no) + ", column " + std::to_string(c + 1) + " (" +
                         ds.column_names[c] + "): '" + std::string(cells[c]) + "' is not a finite number");
      }
      if (c < nx) {
        ds.x(r, static_cast<Eigen::Index>(c)) = v;
      } else {
        (*ds.y)(r) = v;
      }
    }
  }
  if (has_y) ds.column_names.pop_back();
  return ds;
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dataset '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_dataset(buf.str(), path);
}

}  // namespace unifx
