#include "fcft/cauchy.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace fcft {

namespace {
constexpr double kPi = std::numbers::pi;
}

PlanarDomain PlanarDomain::disk() { return {{{0.0, 1.0, true}}}; }

PlanarDomain PlanarDomain::annulus(double q) {
  PlanarDomain d{{{0.0, 1.0, true}, {0.0, q, false}}};
  d.validate();
  return d;
}

PlanarDomain PlanarDomain::pants(Complex w, double r1, double r2) {
  PlanarDomain d{{{0.0, 1.0, true}, {w, r1, false}, {0.0, r2, false}}};
  d.validate();
  return d;
}

void PlanarDomain::validate() const {
  if (circles.empty()) throw std::invalid_argument("domain needs at least one circle");
  if (!circles[0].outgoing) throw std::invalid_argument("circles[0] must be the outer boundary");
  for (int i = 1; i < n_circles(); ++i) {
    const Circle& c = circles[i];
    if (c.outgoing) throw std::invalid_argument("inner circles must be incoming");
    if (std::abs(c.center - circles[0].center) + c.radius >= circles[0].radius)
      throw std::invalid_argument("inner circle not contained in the outer one");
    for (int j = 1; j < i; ++j)
      if (std::abs(c.center - circles[j].center) <= c.radius + circles[j].radius)
        throw std::invalid_argument("inner circles must be disjoint");
  }
  for (const Circle& c : circles)
    if (!(c.radius > 0)) throw std::invalid_argument("radii must be positive");
}

double PlanarDomain::clearance(int i) const {
  double gap = std::numeric_limits<double>::infinity();
  const Circle& c = circles[i];
  for (int j = 0; j < n_circles(); ++j) {
    if (j == i) continue;
    const Circle& o = circles[j];
    double d;
    if (j == 0 || i == 0) {
      const Circle& outer = circles[0];
      const Circle& inner = (i == 0) ? o : c;
      d = outer.radius - std::abs(inner.center - outer.center) - inner.radius;
    } else {
      d = std::abs(c.center - o.center) - c.radius - o.radius;
    }
    gap = std::min(gap, d);
  }
  return gap;
}

BoundaryGrid::BoundaryGrid(const PlanarDomain& dom, int n) : N(n) {
  if (N < 4 || N % 2 != 0) throw std::invalid_argument("grid size must be even and >= 4");
  unit.resize(dom.n_circles());
  points.resize(dom.n_circles());
  for (int j = 0; j < dom.n_circles(); ++j) {
    unit[j].resize(N);
    points[j].resize(N);
    for (int k = 0; k < N; ++k) {
      const Complex w = std::polar(1.0, 2.0 * kPi * k / N);
      unit[j](k) = w;
      points[j](k) = dom.circles[j].center + dom.circles[j].radius * w;
    }
  }
}

Vector BoundaryData::flat() const {
  int total = 0;
  for (const auto& s : samples) total += static_cast<int>(s.size());
  Vector v(total);
  int at = 0;
  for (const auto& s : samples) {
    v.segment(at, s.size()) = s;
    at += static_cast<int>(s.size());
  }
  return v;
}

BoundaryData BoundaryData::unflat(const Vector& v, const BoundaryGrid& g) {
  BoundaryData d;
  int at = 0;
  for (size_t j = 0; j < g.points.size(); ++j) {
    d.samples.push_back(v.segment(at, g.N));
    at += g.N;
  }
  return d;
}

namespace {

Vector dft(const Vector& u) {
  const int N = static_cast<int>(u.size());
  Vector c = Vector::Zero(N);
  for (int n = 0; n < N; ++n) {
    Complex s = 0;
    for (int k = 0; k < N; ++k) s += u(k) * std::polar(1.0, -2.0 * kPi * k * n / N);
    c(n) = s / static_cast<double>(N);
  }
  return c;
}

Vector idft(const Vector& c) {
  const int N = static_cast<int>(c.size());
  Vector u = Vector::Zero(N);
  for (int k = 0; k < N; ++k) {
    Complex s = 0;
    for (int n = 0; n < N; ++n) s += c(n) * std::polar(1.0, 2.0 * kPi * k * n / N);
    u(k) = s;
  }
  return u;
}

int dft_frequency(int j, int N) { return j < N / 2 ? j : j - N; }

Complex ipow(Complex z, int k) {
  Complex acc = 1.0;
  Complex base = (k >= 0) ? z : 1.0 / z;
  for (int i = 0; i < std::abs(k); ++i) acc *= base;
  return acc;
}

}  // namespace

std::vector<Vector> BoundaryData::fourier() const {
  std::vector<Vector> out;
  for (const auto& s : samples) out.push_back(dft(s));
  return out;
}

BoundaryData BoundaryData::from_fourier(const std::vector<Vector>& coeffs) {
  BoundaryData d;
  for (const auto& c : coeffs) d.samples.push_back(idft(c));
  return d;
}

double BoundaryData::high_frequency_fraction() const {
  double total = 0, high = 0;
  for (const auto& s : samples) {
    const int N = static_cast<int>(s.size());
    const Vector c = dft(s);
    for (int j = 0; j < N; ++j) {
      const double e = std::norm(c(j));
      total += e;
      if (std::abs(dft_frequency(j, N)) > N / 4) high += e;
    }
  }
  return total > 0 ? high / total : 0.0;
}

BoundaryData BoundaryData::sample(const std::vector<CircleFunction>& per_circle,
                                  const BoundaryGrid& g) {
  BoundaryData d;
  for (size_t j = 0; j < per_circle.size(); ++j) {
    Vector s = Vector::Zero(g.N);
    for (const auto& [n, c] : per_circle[j].coeffs)
      for (int k = 0; k < g.N; ++k) s(k) += c * ipow(g.unit[j](k), n);
    d.samples.push_back(std::move(s));
  }
  return d;
}

namespace {

// (1/N) sum_{n=a}^{b} omega^{n d} with omega = e^{2 pi i / N}
Complex projection_entry(int d, int a, int b, int N) {
  d = ((d % N) + N) % N;
  if (d == 0) return static_cast<double>(b - a + 1) / N;
  const Complex w = std::polar(1.0, 2.0 * kPi * d / N);
  return ipow(w, a) * (ipow(w, b - a + 1) - 1.0) / (w - 1.0) / static_cast<double>(N);
}

// Fourier projection matrix onto frequencies [a, b] on an N-grid.
Matrix fourier_projection(int a, int b, int N) {
  Matrix p(N, N);
  for (int k = 0; k < N; ++k)
    for (int l = 0; l < N; ++l) p(k, l) = projection_entry(k - l, a, b, N);
  return p;
}

}  // namespace

Matrix cauchy_matrix(const PlanarDomain& dom, const BoundaryGrid& g) {
  const int nc = dom.n_circles(), N = g.N;
  Matrix C = Matrix::Zero(nc * N, nc * N);
  for (int i = 0; i < nc; ++i) {
    for (int j = 0; j < nc; ++j) {
      if (i == j) {
        C.block(i * N, i * N, N, N) =
            dom.circles[i].outgoing ? fourier_projection(0, N / 2 - 1, N)
                                    : fourier_projection(-N / 2, -1, N);
        continue;
      }
      const double eps = dom.circles[j].outgoing ? 1.0 : -1.0;
      const double r = dom.circles[j].radius;
      for (int k = 0; k < N; ++k)
        for (int l = 0; l < N; ++l)
          C(i * N + k, j * N + l) = eps * r * g.unit[j](l) / (g.points[j](l) - g.points[i](k)) /
                                    static_cast<double>(N);
    }
  }
  return C;
}

Matrix hilbert_matrix(const PlanarDomain& dom, const BoundaryGrid& g) {
  Matrix H = cauchy_matrix(dom, g);
  H.diagonal().array() -= 0.5;
  return H;
}

CauchyApplyResult cauchy_apply(const PlanarDomain& dom, const BoundaryGrid& g,
                               const BoundaryData& u) {
  CauchyApplyResult res;
  res.aliasing_warning = u.high_frequency_fraction() > kAliasingThreshold;
  res.values = BoundaryData::unflat(cauchy_matrix(dom, g) * u.flat(), g);
  return res;
}

Matrix formal_adjoint(const PlanarDomain& dom, const BoundaryGrid& g, const Matrix& C) {
  const int nc = dom.n_circles(), N = g.N;
  Vector conj_s(nc * N), conj_m(nc * N);
  for (int j = 0; j < nc; ++j) {
    const double sgn = dom.circles[j].outgoing ? 1.0 : -1.0;
    const double r = dom.circles[j].radius;
    for (int k = 0; k < N; ++k) {
      conj_s(j * N + k) = sgn * std::conj(g.unit[j](k)) * r;
      conj_m(j * N + k) = sgn * g.unit[j](k) / r;
    }
  }
  Matrix cstar = -(conj_s.asDiagonal() * C.conjugate() * conj_m.asDiagonal());
  cstar.diagonal().array() += 1.0;
  return cstar;
}

Matrix kerzman_stein(const PlanarDomain& dom, const BoundaryGrid& g) {
  const Matrix C = cauchy_matrix(dom, g);
  return C - formal_adjoint(dom, g, C);
}

Matrix ks_cross_block(const PlanarDomain& dom, const BoundaryGrid& g, int i, int j) {
  if (i == j) throw std::invalid_argument("ks_cross_block: off-diagonal blocks only");
  const int N = g.N;
  const double eps_i = dom.circles[i].outgoing ? 1.0 : -1.0;
  const double eps_j = dom.circles[j].outgoing ? 1.0 : -1.0;
  const double ri = dom.circles[i].radius, rj = dom.circles[j].radius;
  Matrix block(N, N);
  for (int k = 0; k < N; ++k)
    for (int l = 0; l < N; ++l) {
      const Complex diff = g.points[j](l) - g.points[i](k);
      block(k, l) = (eps_j * rj * g.unit[j](l) / diff +
                     eps_i * std::conj(ri * g.unit[i](k) / diff)) /
                    static_cast<double>(N);
    }
  return block;
}

ProjectionResult hardy_projection_numeric(const PlanarDomain& dom, const BoundaryGrid& g) {
  const Matrix C = cauchy_matrix(dom, g);
  const Matrix A = C - formal_adjoint(dom, g, C);
  ProjectionResult res;
  res.ks_norm = operator_norm(A);
  res.condition_bound = std::sqrt(1.0 + res.ks_norm * res.ks_norm);
  Matrix one_plus_a = A;
  one_plus_a.diagonal().array() += 1.0;
  res.q = one_plus_a.partialPivLu().solve(Matrix::Identity(A.rows(), A.cols()));
  res.q = C * res.q;
  return res;
}

Matrix classical_projection(const PlanarDomain& dom, const BoundaryGrid& g) {
  const int nc = dom.n_circles(), N = g.N;
  Matrix P = Matrix::Zero(nc * N, nc * N);
  for (int j = 0; j < nc; ++j)
    P.block(j * N, j * N, N, N) = dom.circles[j].outgoing ? fourier_projection(0, N / 2 - 1, N)
                                                          : fourier_projection(-N / 2, -1, N);
  return P;
}

BoundaryData boundary_values_direct(const PlanarDomain& dom, const BoundaryGrid& g,
                                    const BoundaryData& u, int upsample) {
  const int nc = dom.n_circles(), N = g.N;
  const int M = upsample * N;

  // Fourier-interpolate the data onto the fine grid (exact for band-limited u)
  std::vector<Vector> fine(nc), fine_unit(nc), fine_points(nc);
  for (int j = 0; j < nc; ++j) {
    const Vector c = dft(u.samples[j]);
    Vector s = Vector::Zero(M);
    fine_unit[j].resize(M);
    fine_points[j].resize(M);
    for (int k = 0; k < M; ++k) {
      const Complex w = std::polar(1.0, 2.0 * kPi * k / M);
      fine_unit[j](k) = w;
      fine_points[j](k) = dom.circles[j].center + dom.circles[j].radius * w;
      Complex acc = 0;
      for (int n = 0; n < N; ++n) acc += c(n) * ipow(w, dft_frequency(n, N));
      s(k) = acc;
    }
    fine[j] = std::move(s);
  }

  BoundaryData out;
  const int K = N / 4;  // reconstructed bandwidth
  for (int i = 0; i < nc; ++i) {
    const Circle& ci = dom.circles[i];
    const double gap = dom.clearance(i);
    const double rel = std::min(0.08, gap / (3.0 * ci.radius));
    const double rho = ci.outgoing ? ci.radius * (1.0 - rel) : ci.radius * (1.0 + rel);

    // Cauchy integral at the ring points by plain quadrature
    Vector ring(N);
    for (int k = 0; k < N; ++k) {
      const Complex t = ci.center + rho * std::polar(1.0, 2.0 * kPi * k / N);
      Complex acc = 0;
      for (int j = 0; j < nc; ++j) {
        const double eps = dom.circles[j].outgoing ? 1.0 : -1.0;
        const double r = dom.circles[j].radius;
        Complex block = 0;
        for (int l = 0; l < M; ++l) block += fine[j](l) * r * fine_unit[j](l) / (fine_points[j](l) - t);
        acc += eps * block / static_cast<double>(M);
      }
      ring(k) = acc;
    }

    // Laurent continuation from the ring back to the circle
    const Vector rc = dft(ring);
    Vector bc = Vector::Zero(N);
    const double ratio = rho / ci.radius;
    for (int n = 0; n < N; ++n) {
      const int f = dft_frequency(n, N);
      if (std::abs(f) <= K) bc(n) = rc(n) / std::pow(ratio, f);
    }
    out.samples.push_back(idft(bc));
  }
  return out;
}

namespace {

DecayReport decay_of(Matrix m) {
  DecayReport rep;
  const Matrix asym = m - m.adjoint();
  rep.asymmetry = asym.cwiseAbs().maxCoeff();
  const Matrix herm = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(herm);
  Eigen::VectorXd s = es.eigenvalues().cwiseAbs();
  std::sort(s.data(), s.data() + s.size(), std::greater<double>());
  rep.singular_values = s;
  rep.partial_sums.resize(s.size());
  double acc = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    acc += s(k);
    rep.partial_sums(k) = acc;
  }
  // least-squares slope of log10 s_k over the usable window
  std::vector<double> xs, ys;
  for (Eigen::Index k = 0; k < std::min<Eigen::Index>(s.size(), 40); ++k) {
    if (s(k) < 1e-14) break;
    xs.push_back(static_cast<double>(k));
    ys.push_back(std::log10(s(k)));
  }
  if (xs.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t t = 0; t < xs.size(); ++t) {
      sx += xs[t];
      sy += ys[t];
      sxx += xs[t] * xs[t];
      sxy += xs[t] * ys[t];
    }
    const double n = static_cast<double>(xs.size());
    rep.fitted_log10_slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
  return rep;
}

}  // namespace

DecayReport trace_class_diagnostic(const PlanarDomain& dom, const BoundaryGrid& g) {
  const Matrix q = hardy_projection_numeric(dom, g).q;
  return decay_of(q - classical_projection(dom, g));
}

DecayReport ks_decay(const PlanarDomain& dom, const BoundaryGrid& g) {
  // A is skew-adjoint, so iA is Hermitian with the same singular values
  return decay_of(Complex(0, 1) * kerzman_stein(dom, g));
}

double perp_residual_spans(const BoundaryGrid& g, const SurfaceShape& shape,
                           const std::vector<HardyElement>& hardy) {
  std::vector<Vector> vs, ts;
  for (const auto& h : hardy) {
    std::vector<CircleFunction> parts = h.parts;
    vs.push_back(BoundaryData::sample(parts, g).flat());
    ts.push_back(BoundaryData::sample(perp_transform(h, shape).parts, g).flat());
  }
  double worst = 0;
  for (const auto& v : vs)
    for (const auto& t : ts) {
      const double nv = v.norm(), nt = t.norm();
      if (nv == 0 || nt == 0) continue;
      worst = std::max(worst, std::abs(v.dot(t)) / (nv * nt));
    }
  return worst;
}

double perp_residual_numeric(const PlanarDomain& dom, const BoundaryGrid& g,
                             const std::vector<Sector>& sectors) {
  const int nc = dom.n_circles(), N = g.N;
  const Matrix q = hardy_projection_numeric(dom, g).q;
  // numeric Hardy vectors: projections of band-limited monomial probes
  // (per circle, |k| <= N/4), keeping the comparison away from the grid's
  // aliased edge frequencies
  std::vector<Vector> cols;
  for (int j = 0; j < nc; ++j)
    for (int k = -N / 4; k <= N / 4; ++k) {
      Vector probe = Vector::Zero(nc * N);
      for (int s = 0; s < N; ++s) probe(j * N + s) = ipow(g.unit[j](s), k);
      Vector v = q * probe;
      if (v.norm() > 0.3 * probe.norm()) cols.push_back(v / v.norm());
    }
  Matrix U(nc * N, cols.size());
  for (size_t i = 0; i < cols.size(); ++i) U.col(i) = cols[i];

  // spin weights: 1 on the outer circle, sqrt(radius) on inner NS circles
  Vector w(nc * N), mzn(nc * N), mpm(nc * N);
  for (int j = 0; j < nc; ++j) {
    const double wt = (j == 0 || sectors[j] == Sector::R) ? 1.0 : std::sqrt(dom.circles[j].radius);
    for (int k = 0; k < N; ++k) {
      w(j * N + k) = wt;
      mzn(j * N + k) = sectors[j] == Sector::NS ? g.unit[j](k) : 1.0;
      mpm(j * N + k) = dom.circles[j].outgoing ? 1.0 : -1.0;
    }
  }
  const Matrix V = w.asDiagonal() * U;
  const Matrix T = mpm.asDiagonal() * (mzn.asDiagonal() * V).conjugate();
  double worst = 0;
  for (Eigen::Index a = 0; a < V.cols(); ++a)
    for (Eigen::Index b = 0; b < T.cols(); ++b) {
      const double nv = V.col(a).norm(), nt = T.col(b).norm();
      if (nv == 0 || nt == 0) continue;
      worst = std::max(worst, std::abs(V.col(a).dot(T.col(b))) / (nv * nt));
    }
  return worst;
}

std::string decay_report_json(const std::string& domain_name, int N, const DecayReport& rep) {
  std::ostringstream os;
  os.precision(17);
  os << "{\"domain\":\"" << domain_name << "\",\"grid\":" << N << ",\"fitted_log10_slope\":"
     << rep.fitted_log10_slope << ",\"asymmetry\":" << rep.asymmetry << ",\"singular_values\":[";
  const Eigen::Index n = std::min<Eigen::Index>(rep.singular_values.size(), 60);
  for (Eigen::Index i = 0; i < n; ++i) os << (i ? "," : "") << rep.singular_values(i);
  os << "],\"partial_sums\":[";
  for (Eigen::Index i = 0; i < n; ++i) os << (i ? "," : "") << rep.partial_sums(i);
  os << "]}";
  return os.str();
}

std::string singular_values_csv(const DecayReport& rep) {
  std::ostringstream os;
  os.precision(17);
  os << "k,singular_value,partial_sum\r\n";
  for (Eigen::Index i = 0; i < rep.singular_values.size(); ++i)
    os << i + 1 << "," << rep.singular_values(i) << "," << rep.partial_sums(i) << "\r\n";
  return os.str();
}

}  // namespace fcft
