#include "cmslab/spinspace.hpp"

#include <omp.h>

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>

namespace cmslab {

std::size_t spin_dim(int n, int N) {
    if (n < 0 || N < 1) throw std::invalid_argument("spin space needs n >= 0 and N >= 1");
    std::size_t d = 1;
    for (int i = 0; i < n; ++i) {
        d *= static_cast<std::size_t>(N);
        if (d > (std::size_t{1} << 40)) throw std::length_error("spin space too large");
    }
    return d;
}

SiteMap identity_map(int n) {
    SiteMap s(n);
    for (int i = 0; i < n; ++i) s[i] = i;
    return s;
}

SiteMap transposition_map(int n, int i, int j) {
    if (i < 0 || j < 0 || i >= n || j >= n) throw std::out_of_range("transposition site out of range");
    if (i == j) throw std::invalid_argument("transposition needs distinct sites");
    SiteMap s = identity_map(n);
    std::swap(s[i], s[j]);
    return s;
}

SiteMap compose(const SiteMap& a, const SiteMap& b) {
    if (a.size() != b.size()) throw std::invalid_argument("compose: size mismatch");
    SiteMap r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[b[i]];
    return r;
}

SiteMap inverse(const SiteMap& a) {
    SiteMap r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[a[i]] = static_cast<int>(i);
    return r;
}

namespace {

// Output amplitude b reads input index sum_j b_j * stride[j].
std::vector<std::size_t> source_strides(const SiteMap& sigma, int n, int N) {
    if (static_cast<int>(sigma.size()) != n) throw std::invalid_argument("permutation size mismatch");
    std::vector<std::size_t> pw(n + 1, 1);
    for (int i = 0; i < n; ++i) pw[i + 1] = pw[i] * static_cast<std::size_t>(N);
    std::vector<std::size_t> stride(n);
    for (int i = 0; i < n; ++i) stride[sigma[i]] = pw[i];
    return stride;
}

// Odometer over output indices [lo, hi): visit(b, a) with a the source index of b.
template <class Visit>
void walk(const std::vector<std::size_t>& stride, int N, std::size_t lo, std::size_t hi, Visit visit) {
    const std::size_t n = stride.size();
    std::vector<std::size_t> digit(n);
    std::size_t a = 0, rest = lo;
    for (std::size_t j = 0; j < n; ++j) {
        digit[j] = rest % N;
        a += digit[j] * stride[j];
        rest /= N;
    }
    for (std::size_t b = lo; b < hi; ++b) {
        visit(b, a);
        for (std::size_t j = 0; j < n; ++j) {
            a += stride[j];
            if (++digit[j] < static_cast<std::size_t>(N)) break;
            a -= stride[j] * N;
            digit[j] = 0;
        }
    }
}

// Each thread walks one contiguous block.
template <class Visit>
void walk_parallel(const std::vector<std::size_t>& stride, int N, std::size_t d, Visit visit) {
#pragma omp parallel
    {
        const auto threads = static_cast<std::size_t>(omp_get_num_threads());
        const auto id = static_cast<std::size_t>(omp_get_thread_num());
        walk(stride, N, d * id / threads, d * (id + 1) / threads, visit);
    }
}

}  // namespace

void apply_permutation_serial(const SiteMap& sigma, int n, int N, const cplx* in, cplx* out) {
    walk(source_strides(sigma, n, N), N, 0, spin_dim(n, N), [&](std::size_t b, std::size_t a) { out[b] = in[a]; });
}

void apply_permutation(const SiteMap& sigma, int n, int N, const cplx* in, cplx* out) {
    walk_parallel(source_strides(sigma, n, N), N, spin_dim(n, N), [&](std::size_t b, std::size_t a) { out[b] = in[a]; });
}

void accumulate_permutation(const SiteMap& sigma, cplx w, int n, int N, const cplx* in, cplx* out) {
    walk_parallel(source_strides(sigma, n, N), N, spin_dim(n, N),
                  [&](std::size_t b, std::size_t a) { out[b] += w * in[a]; });
}

// ---------------------------------------------------------------------------

SpinVector::SpinVector(int n, int N) : n_(n), N_(N), amp_(CVector::Zero(static_cast<Eigen::Index>(spin_dim(n, N)))) {}

SpinVector::SpinVector(int n, int N, CVector amp) : n_(n), N_(N), amp_(std::move(amp)) {
    if (static_cast<std::size_t>(amp_.size()) != spin_dim(n, N))
        throw std::invalid_argument("SpinVector: amplitude length is not N^n");
}

SpinVector SpinVector::basis(int n, int N, const std::vector<int>& digits) {
    if (static_cast<int>(digits.size()) != n) throw std::invalid_argument("basis: need one digit per site");
    SpinVector v(n, N);
    std::size_t idx = 0, pw = 1;
    for (int i = 0; i < n; ++i) {
        if (digits[i] < 0 || digits[i] >= N) throw std::out_of_range("basis digit out of range");
        idx += digits[i] * pw;
        pw *= N;
    }
    v.amp_[static_cast<Eigen::Index>(idx)] = 1.0;
    return v;
}

SpinVector SpinVector::random(int n, int N, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    SpinVector v(n, N);
    for (Eigen::Index k = 0; k < v.amp_.size(); ++k) v.amp_[k] = {g(rng), g(rng)};
    v.amp_.normalize();
    return v;
}

cplx SpinVector::dot(const SpinVector& o) const {
    if (o.n_ != n_ || o.N_ != N_) throw std::invalid_argument("SpinVector: dimension mismatch");
    return amp_.dot(o.amp_);
}

// ---------------------------------------------------------------------------

SpinOperator::SpinOperator(int n, int N) : n_(n), N_(N) { spin_dim(n, N); }

SpinOperator SpinOperator::identity(int n, int N) { return permutation(n, N, identity_map(n)); }

SpinOperator SpinOperator::dense(int n, int N, CMatrix m) {
    SpinOperator op(n, N);
    auto d = static_cast<Eigen::Index>(op.dim());
    if (m.rows() != d || m.cols() != d) throw std::invalid_argument("SpinOperator: matrix is not N^n x N^n");
    op.dense_ = true;
    op.mat_ = std::move(m);
    return op;
}

SpinOperator SpinOperator::words(int n, int N, std::vector<WeightedWord> w) {
    SpinOperator op(n, N);
    for (const auto& x : w)
        if (static_cast<int>(x.sigma.size()) != n) throw std::invalid_argument("SpinOperator: word size mismatch");
    op.words_ = std::move(w);
    op.simplify();
    return op;
}

SpinOperator SpinOperator::permutation(int n, int N, const SiteMap& sigma) {
    return words(n, N, {{1.0, sigma}});
}

void SpinOperator::simplify() {
    std::map<SiteMap, cplx> acc;
    for (auto& w : words_) acc[w.sigma] += w.weight;
    words_.clear();
    for (auto& [s, c] : acc)
        if (c != cplx(0)) words_.push_back({c, s});
}

CMatrix SpinOperator::to_dense() const {
    if (dense_) return mat_;
    const std::size_t d = dim();
    if (d > kMaxDenseDim)
        throw std::length_error("dense spin operator limited to " + std::to_string(kMaxDenseDim) + " states");
    auto D = static_cast<Eigen::Index>(d);
    CMatrix m = CMatrix::Zero(D, D);
    CVector label(D), src(D);
    for (Eigen::Index a = 0; a < D; ++a) label[a] = static_cast<double>(a);
    for (const auto& w : words_) {
        apply_permutation_serial(w.sigma, n_, N_, label.data(), src.data());
        for (Eigen::Index b = 0; b < D; ++b) m(b, static_cast<Eigen::Index>(src[b].real())) += w.weight;
    }
    return m;
}

void SpinOperator::check_same(const SpinOperator& o) const {
    if (o.n_ != n_ || o.N_ != N_) throw std::invalid_argument("SpinOperator: dimension mismatch");
}

SpinVector SpinOperator::apply(const SpinVector& v) const {
    if (v.sites() != n_ || v.local_dim() != N_) throw std::invalid_argument("apply: dimension mismatch");
    if (dense_) return SpinVector(n_, N_, mat_ * v.amplitudes());
    SpinVector r(n_, N_);
    for (const auto& w : words_)
        accumulate_permutation(w.sigma, w.weight, n_, N_, v.amplitudes().data(), r.amplitudes().data());
    return r;
}

SpinVector SpinOperator::apply_serial(const SpinVector& v) const {
    if (v.sites() != n_ || v.local_dim() != N_) throw std::invalid_argument("apply: dimension mismatch");
    if (dense_) return SpinVector(n_, N_, mat_ * v.amplitudes());
    SpinVector r(n_, N_);
    CVector tmp(v.amplitudes().size());
    for (const auto& w : words_) {
        apply_permutation_serial(w.sigma, n_, N_, v.amplitudes().data(), tmp.data());
        r.amplitudes() += w.weight * tmp;
    }
    return r;
}

SpinOperator& SpinOperator::operator+=(const SpinOperator& o) {
    check_same(o);
    if (!dense_ && !o.dense_) {
        words_.insert(words_.end(), o.words_.begin(), o.words_.end());
        simplify();
        return *this;
    }
    mat_ = to_dense() + o.to_dense();
    dense_ = true;
    words_.clear();
    return *this;
}

SpinOperator& SpinOperator::operator-=(const SpinOperator& o) { return *this += o * cplx(-1.0); }

SpinOperator& SpinOperator::operator*=(cplx c) {
    if (dense_) {
        mat_ *= c;
        return *this;
    }
    for (auto& w : words_) w.weight *= c;
    simplify();
    return *this;
}

SpinOperator operator*(const SpinOperator& a, const SpinOperator& b) {
    a.check_same(b);
    if (!a.dense_ && !b.dense_) {
        std::vector<WeightedWord> w;
        w.reserve(a.words_.size() * b.words_.size());
        for (const auto& x : a.words_)
            for (const auto& y : b.words_) w.push_back({x.weight * y.weight, compose(x.sigma, y.sigma)});
        return SpinOperator::words(a.n_, a.N_, std::move(w));
    }
    return SpinOperator::dense(a.n_, a.N_, a.to_dense() * b.to_dense());
}

SpinOperator SpinOperator::adjoint() const {
    if (dense_) return dense(n_, N_, mat_.adjoint());
    std::vector<WeightedWord> w;
    for (const auto& x : words_) w.push_back({std::conj(x.weight), inverse(x.sigma)});
    return words(n_, N_, std::move(w));
}

SpinOperator permutation_op(int i, int j, int n, int N) {
    if (i < 1 || j < 1 || i > n || j > n) throw std::out_of_range("permutation_op: site out of range");
    if (i == j) throw std::invalid_argument("permutation_op: i == j");
    return SpinOperator::permutation(n, N, transposition_map(n, i - 1, j - 1));
}

SpinVector apply(const SpinOperator& op, const SpinVector& v) { return op.apply(v); }

SpinOperator commutator(const SpinOperator& a, const SpinOperator& b) { return a * b - b * a; }

double op_norm(const SpinOperator& a) { return a.to_dense().norm(); }

bool is_hermitian(const SpinOperator& a, double tol) {
    CMatrix m = a.to_dense();
    return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

// ---------------------------------------------------------------------------

namespace {

nlohmann::json complex_list(const cplx* x, std::size_t len) {
    nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
    for (std::size_t k = 0; k < len; ++k) {
        re.push_back(x[k].real());
        im.push_back(x[k].imag());
    }
    return {{"re", re}, {"im", im}};
}

}  // namespace

void to_json(nlohmann::json& j, const SpinVector& v) {
    j = {{"n", v.sites()}, {"N", v.local_dim()}, {"amplitudes", complex_list(v.amplitudes().data(), v.dim())}};
}

void to_json(nlohmann::json& j, const SpinOperator& op) {
    j = {{"n", op.sites()}, {"N", op.local_dim()}};
    if (op.is_dense()) {
        CMatrix m = op.to_dense();
        nlohmann::json rows = nlohmann::json::array();
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            Eigen::VectorXcd row = m.row(r).transpose();
            rows.push_back(complex_list(row.data(), static_cast<std::size_t>(row.size())));
        }
        j["dense"] = rows;
    } else {
        nlohmann::json ws = nlohmann::json::array();
        for (const auto& w : op.word_list())
            ws.push_back({{"weight", {w.weight.real(), w.weight.imag()}}, {"perm", w.sigma}});
        j["words"] = ws;
    }
}

SpinVector spin_vector_from_json(const nlohmann::json& j) {
    int n = j.at("n"), N = j.at("N");
    const auto& re = j.at("amplitudes").at("re");
    const auto& im = j.at("amplitudes").at("im");
    CVector a(static_cast<Eigen::Index>(re.size()));
    for (std::size_t k = 0; k < re.size(); ++k) a[static_cast<Eigen::Index>(k)] = {re[k].get<double>(), im[k].get<double>()};
    return {n, N, a};
}

SpinOperator spin_operator_from_json(const nlohmann::json& j) {
    int n = j.at("n"), N = j.at("N");
    if (j.contains("dense")) {
        const auto& rows = j["dense"];
        auto d = static_cast<Eigen::Index>(rows.size());
        CMatrix m(d, d);
        for (Eigen::Index r = 0; r < d; ++r)
            for (Eigen::Index c = 0; c < d; ++c)
                m(r, c) = {rows[r]["re"][c].get<double>(), rows[r]["im"][c].get<double>()};
        return SpinOperator::dense(n, N, m);
    }
    std::vector<WeightedWord> w;
    for (const auto& x : j.at("words"))
        w.push_back({{x["weight"][0].get<double>(), x["weight"][1].get<double>()}, x["perm"].get<SiteMap>()});
    return SpinOperator::words(n, N, w);
}

}  // namespace cmslab
