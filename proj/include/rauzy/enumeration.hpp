#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rauzy/gasket_core.hpp"
#include "rauzy/parallel.hpp"
#include "rauzy/rational.hpp"

namespace rauzy {

// delta = 1 runs entirely in exact rationals; any other exponent uses
// doubles (rational powers of rationals are irrational in general).
class DeltaMode {
public:
    static DeltaMode exact_unit() { return DeltaMode(true, 1.0); }
    static DeltaMode floating(double delta) {
        if (!(delta > 0.0) || delta > 1.0) {
            throw std::invalid_argument("delta must lie in (0,1]");
        }
        return DeltaMode(false, delta);
    }

    bool is_exact() const { return exact_; }
    double delta() const { return delta_; }

private:
    DeltaMode(bool exact, double delta) : exact_(exact), delta_(delta) {}
    bool exact_;
    double delta_;
};

// Exact value plus float mirror (mirror only, in exact mode).
struct ModeValue {
    std::optional<Rational> exact;
    double approx = 0.0;

    static ModeValue from_exact(Rational q) {
        ModeValue v;
        v.approx = to_double(q);
        v.exact = std::move(q);
        return v;
    }
    static ModeValue from_float(double x) {
        ModeValue v;
        v.approx = x;
        return v;
    }
};

struct XRecord {
    int n = 0;
    std::optional<int> k;  // absent for the full sum X_n
    ModeValue value;
    std::uint64_t word_count = 0;
};

class BudgetError : public std::runtime_error {
public:
    explicit BudgetError(const std::string& msg) : std::runtime_error(msg) {}
};

inline constexpr std::uint64_t kDefaultEnumerationBudget = 1594323;  // 3^13

struct EnumOptions {
    std::uint64_t budget = kDefaultEnumerationBudget;
    int threads = 0;      // 0 = resolve from env/hardware
    int prefix_depth = 4; // parallel split depth; fixed so chunking is canonical
};

// Result of sorting a word into the leading-constant-run partition:
// Partition(k) when the first k symbols agree and the (k+1)-th differs,
// Constant when all symbols agree.
struct WordClass {
    bool constant = false;
    int k = 0;  // meaningful only when !constant

    static WordClass make_constant() { return WordClass{true, 0}; }
    static WordClass partition(int k) { return WordClass{false, k}; }
    friend bool operator==(WordClass a, WordClass b) {
        return a.constant == b.constant && (a.constant || a.k == b.k);
    }
};

inline WordClass classify(const Word& w) {
    if (w.empty()) throw std::invalid_argument("cannot classify the empty word");
    std::size_t run = 1;
    while (run < w.size() && w[run] == w[0]) ++run;
    if (run == w.size()) return WordClass::make_constant();
    return WordClass::partition(static_cast<int>(run));
}

// One depth level of the enumeration: the full covering sum, its split by
// leading-run length, and the constant-word remainder class.
template <typename V>
struct LevelSums {
    V total{};
    V constant{};
    std::vector<V> by_k;  // index k-1 for k in 1..n-1

    explicit LevelSums(int n) : by_k(n >= 2 ? static_cast<std::size_t>(n - 1) : 0) {}
    LevelSums() = default;
};

namespace detail {

struct ExactPolicy {
    using value_type = Rational;
    value_type weight(const Rational& volume) const { return volume; }
};

struct FloatPolicy {
    double delta;
    using value_type = double;
    value_type weight(const Rational& volume) const {
        return std::pow(to_double(volume), delta);
    }
};

inline std::uint64_t checked_pow_u64(std::uint64_t base, int exp) {
    std::uint64_t out = 1;
    for (int i = 0; i < exp; ++i) {
        if (out > UINT64_MAX / base) {
            throw BudgetError("word count overflows 64 bits");
        }
        out *= base;
    }
    return out;
}

// Running DFS state for the leading-constant-run classification.
struct ClassState {
    Symbol first = 0;
    int run = 0;       // length of the leading constant run seen so far
    int broken_k = 0;  // 0 while still constant
};

inline ClassState extend_class(ClassState s, Symbol next, int depth) {
    if (depth == 0) return ClassState{next, 1, 0};
    if (s.broken_k == 0) {
        if (next == s.first) {
            ++s.run;
        } else {
            s.broken_k = s.run;
        }
    }
    return s;
}

template <typename Policy>
class LevelEnumerator {
public:
    using V = typename Policy::value_type;

    LevelEnumerator(Dimension d, int n_max, const Policy& policy)
        : d_(d.value()), n_max_(n_max), policy_(policy) {
        generators_.reserve(static_cast<std::size_t>(d_));
        for (Symbol j = 1; j <= d_; ++j) generators_.push_back(generator_matrix(d, j));
    }

    // Accumulates weights for every node with prefix_depth < depth <= n_max
    // beneath the given prefix node, in canonical DFS order.
    void run_subtree(const BigMatrix& prefix_matrix, int prefix_depth, ClassState state,
                     std::vector<LevelSums<V>>& sums) {
        workspace_.clear();
        for (int depth = 0; depth <= n_max_; ++depth) workspace_.emplace_back(d_);
        workspace_[static_cast<std::size_t>(prefix_depth)] = prefix_matrix;
        descend(prefix_depth, state, sums);
    }

    V node_weight(const BigMatrix& m) const { return policy_.weight(nu(m)); }

private:
    void descend(int depth, ClassState state, std::vector<LevelSums<V>>& sums) {
        if (depth >= n_max_) return;
        const BigMatrix& current = workspace_[static_cast<std::size_t>(depth)];
        BigMatrix& child = workspace_[static_cast<std::size_t>(depth + 1)];
        for (Symbol j = 1; j <= d_; ++j) {
            BigMatrix::multiply_into(current, generators_[static_cast<std::size_t>(j - 1)], child);
            ClassState next = extend_class(state, j, depth);
            record(child, depth + 1, next, sums);
            descend(depth + 1, next, sums);
        }
    }

    void record(const BigMatrix& m, int depth, const ClassState& state,
                std::vector<LevelSums<V>>& sums) {
        V w = node_weight(m);
        LevelSums<V>& level = sums[static_cast<std::size_t>(depth)];
        level.total += w;
        if (state.broken_k == 0) {
            level.constant += w;
        } else {
            level.by_k[static_cast<std::size_t>(state.broken_k - 1)] += w;
        }
    }

    int d_;
    int n_max_;
    Policy policy_;
    std::vector<BigMatrix> generators_;
    std::vector<BigMatrix> workspace_;
};

// Full table computation with the deterministic prefix split: levels up to
// the split depth are accumulated sequentially while the split nodes are
// collected; each split subtree is an independent task; task results merge
// in canonical prefix order regardless of worker count.
template <typename Policy>
std::vector<LevelSums<typename Policy::value_type>> enumerate_levels(Dimension d, int n_max,
                                                                     const Policy& policy,
                                                                     const EnumOptions& opts) {
    using V = typename Policy::value_type;
    if (n_max < 0) throw std::invalid_argument("negative enumeration depth");
    std::uint64_t leaves = checked_pow_u64(static_cast<std::uint64_t>(d.value()), n_max);
    if (leaves > opts.budget) {
        throw BudgetError("enumeration of " + std::to_string(leaves) +
                          " words exceeds budget " + std::to_string(opts.budget));
    }

    std::vector<LevelSums<V>> sums;
    sums.reserve(static_cast<std::size_t>(n_max + 1));
    for (int n = 0; n <= n_max; ++n) sums.emplace_back(n);

    LevelEnumerator<Policy> root(d, n_max, policy);

    const int split = std::min(opts.prefix_depth, n_max);
    if (split <= 0) {
        root.run_subtree(BigMatrix::identity(d.value()), 0, ClassState{}, sums);
        sums[0].total += policy.weight(Rational(1));
        return sums;
    }

    struct Task {
        BigMatrix matrix;
        ClassState state;
        Task() : matrix(1) {}
    };
    std::vector<Task> tasks;
    tasks.reserve(static_cast<std::size_t>(checked_pow_u64(
        static_cast<std::uint64_t>(d.value()), split)));

    // Sequential shallow pass: record levels 1..split, collect split nodes.
    {
        std::vector<BigMatrix> stack;
        for (int depth = 0; depth <= split; ++depth) stack.emplace_back(d.value());
        stack[0] = BigMatrix::identity(d.value());
        std::vector<BigMatrix> generators;
        for (Symbol j = 1; j <= d.value(); ++j) generators.push_back(generator_matrix(d, j));

        auto shallow = [&](auto&& self, int depth, ClassState state) -> void {
            if (depth == split) {
                Task t;
                t.matrix = stack[static_cast<std::size_t>(depth)];
                t.state = state;
                tasks.push_back(std::move(t));
                return;
            }
            for (Symbol j = 1; j <= d.value(); ++j) {
                BigMatrix::multiply_into(stack[static_cast<std::size_t>(depth)],
                                         generators[static_cast<std::size_t>(j - 1)],
                                         stack[static_cast<std::size_t>(depth + 1)]);
                ClassState next = extend_class(state, j, depth);
                V w = root.node_weight(stack[static_cast<std::size_t>(depth + 1)]);
                LevelSums<V>& level = sums[static_cast<std::size_t>(depth + 1)];
                level.total += w;
                if (next.broken_k == 0) level.constant += w;
                else level.by_k[static_cast<std::size_t>(next.broken_k - 1)] += w;
                self(self, depth + 1, next);
            }
        };
        shallow(shallow, 0, ClassState{});
    }

    sums[0].total += policy.weight(Rational(1));  // empty word

    if (split < n_max) {
        std::vector<std::vector<LevelSums<V>>> partials(tasks.size());
        int workers = resolve_threads(opts.threads);
        parallel_for_index(tasks.size(), workers, [&](std::size_t i) {
            std::vector<LevelSums<V>> local;
            local.reserve(static_cast<std::size_t>(n_max + 1));
            for (int n = 0; n <= n_max; ++n) local.emplace_back(n);
            LevelEnumerator<Policy> worker(d, n_max, policy);
            worker.run_subtree(tasks[i].matrix, split, tasks[i].state, local);
            partials[i] = std::move(local);
        });
        // Canonical merge: prefix order, then depth, then class.
        for (const auto& part : partials) {
            for (int n = split + 1; n <= n_max; ++n) {
                auto& dst = sums[static_cast<std::size_t>(n)];
                const auto& src = part[static_cast<std::size_t>(n)];
                dst.total += src.total;
                dst.constant += src.constant;
                for (std::size_t kk = 0; kk < src.by_k.size(); ++kk) {
                    dst.by_k[kk] += src.by_k[kk];
                }
            }
        }
    }
    return sums;
}

}  // namespace detail

inline std::vector<LevelSums<Rational>> exact_levels(Dimension d, int n_max,
                                                     const EnumOptions& opts = {}) {
    return detail::enumerate_levels(d, n_max, detail::ExactPolicy{}, opts);
}

inline std::vector<LevelSums<double>> float_levels(Dimension d, int n_max, double delta,
                                                   const EnumOptions& opts = {}) {
    return detail::enumerate_levels(d, n_max, detail::FloatPolicy{delta}, opts);
}

inline std::uint64_t words_at_level(Dimension d, int n) {
    return detail::checked_pow_u64(static_cast<std::uint64_t>(d.value()), n);
}

// X_n = sum over |w| = n of nu(M_w)^delta; X_0 = 1.
inline XRecord x_sum(Dimension d, int n, DeltaMode mode, const EnumOptions& opts = {}) {
    XRecord rec;
    rec.n = n;
    rec.word_count = words_at_level(d, n);
    if (mode.is_exact()) {
        auto levels = exact_levels(d, n, opts);
        rec.value = ModeValue::from_exact(levels[static_cast<std::size_t>(n)].total);
    } else {
        auto levels = float_levels(d, n, mode.delta(), opts);
        rec.value = ModeValue::from_float(levels[static_cast<std::size_t>(n)].total);
    }
    return rec;
}

inline std::uint64_t partition_word_count(Dimension d, int n, int k) {
    // first symbol free, symbol k+1 differs, the rest free
    std::uint64_t count = static_cast<std::uint64_t>(d.value()) *
                          static_cast<std::uint64_t>(d.value() - 1);
    return count * detail::checked_pow_u64(static_cast<std::uint64_t>(d.value()), n - k - 1);
}

// X_{n,k}: restriction of X_n to words whose leading constant run is k.
inline XRecord x_partition_sum(Dimension d, int n, int k, DeltaMode mode,
                               const EnumOptions& opts = {}) {
    if (k < 1 || k >= n) {
        throw std::invalid_argument("partition sum needs 1 <= k < n");
    }
    XRecord rec;
    rec.n = n;
    rec.k = k;
    rec.word_count = partition_word_count(d, n, k);
    if (mode.is_exact()) {
        auto levels = exact_levels(d, n, opts);
        rec.value = ModeValue::from_exact(
            levels[static_cast<std::size_t>(n)].by_k[static_cast<std::size_t>(k - 1)]);
    } else {
        auto levels = float_levels(d, n, mode.delta(), opts);
        rec.value = ModeValue::from_float(
            levels[static_cast<std::size_t>(n)].by_k[static_cast<std::size_t>(k - 1)]);
    }
    return rec;
}

// nu(M_1 M_2^n) in closed form: 2^{1-d} (2n+1)^{-1} (n+1)^{2-d}.
inline Rational m1m2n_volume_closed_form(Dimension d, int n) {
    if (n < 0) throw std::invalid_argument("negative power");
    BigInt den = 1;
    mpz_ui_pow_ui(den.get_mpz_t(), 2, static_cast<unsigned long>(d.value() - 1));
    den *= 2 * n + 1;
    BigInt np1;
    mpz_ui_pow_ui(np1.get_mpz_t(), static_cast<unsigned long>(n + 1),
                  static_cast<unsigned long>(d.value() - 2));
    den *= np1;
    return make_rational(1, den);
}

// r_n = sum over constant words j^n and omega != j of nu(M_omega M_j^n)^delta,
// by direct summation over all d(d-1) pairs.
inline ModeValue remainder_term(Dimension d, int n, DeltaMode mode) {
    if (n < 1) throw std::invalid_argument("remainder term needs n >= 1");
    Rational exact_sum;
    double float_sum = 0.0;
    for (Symbol j = 1; j <= d.value(); ++j) {
        BigMatrix power = BigMatrix::identity(d.value());
        BigMatrix gen = generator_matrix(d, j);
        BigMatrix tmp(d.value());
        for (int i = 0; i < n; ++i) {
            BigMatrix::multiply_into(power, gen, tmp);
            std::swap(power, tmp);
        }
        for (Symbol omega = 1; omega <= d.value(); ++omega) {
            if (omega == j) continue;
            BigMatrix m = generator_matrix(d, omega) * power;
            Rational volume = nu(m);
            if (mode.is_exact()) exact_sum += volume;
            else float_sum += std::pow(to_double(volume), mode.delta());
        }
    }
    if (mode.is_exact()) return ModeValue::from_exact(std::move(exact_sum));
    return ModeValue::from_float(float_sum);
}

// All summands of r_n, row by row, for auditing their pairwise equality.
inline std::vector<Rational> remainder_summands(Dimension d, int n) {
    if (n < 1) throw std::invalid_argument("remainder term needs n >= 1");
    std::vector<Rational> out;
    for (Symbol j = 1; j <= d.value(); ++j) {
        BigMatrix power = BigMatrix::identity(d.value());
        BigMatrix gen = generator_matrix(d, j);
        BigMatrix tmp(d.value());
        for (int i = 0; i < n; ++i) {
            BigMatrix::multiply_into(power, gen, tmp);
            std::swap(power, tmp);
        }
        for (Symbol omega = 1; omega <= d.value(); ++omega) {
            if (omega == j) continue;
            out.push_back(nu(generator_matrix(d, omega) * power));
        }
    }
    return out;
}

// Sum of nu(M_prefix M_w)^delta over all |w| = n, for a fixed prefix word.
inline ModeValue prefixed_sum(Dimension d, const Word& prefix, int n, DeltaMode mode,
                              const EnumOptions& opts = {}) {
    if (n < 0) throw std::invalid_argument("negative enumeration depth");
    std::uint64_t leaves = words_at_level(d, n);
    if (leaves > opts.budget) {
        throw BudgetError("enumeration of " + std::to_string(leaves) +
                          " words exceeds budget " + std::to_string(opts.budget));
    }
    BigMatrix seed = word_matrix(d, prefix);
    std::vector<BigMatrix> generators;
    for (Symbol j = 1; j <= d.value(); ++j) generators.push_back(generator_matrix(d, j));
    std::vector<BigMatrix> stack;
    for (int depth = 0; depth <= n; ++depth) stack.emplace_back(d.value());
    stack[0] = seed;

    Rational exact_sum;
    double float_sum = 0.0;
    auto leaf = [&](const BigMatrix& m) {
        Rational volume = nu(m);
        if (mode.is_exact()) exact_sum += volume;
        else float_sum += std::pow(to_double(volume), mode.delta());
    };
    auto dfs = [&](auto&& self, int depth) -> void {
        if (depth == n) {
            leaf(stack[static_cast<std::size_t>(depth)]);
            return;
        }
        for (Symbol j = 1; j <= d.value(); ++j) {
            BigMatrix::multiply_into(stack[static_cast<std::size_t>(depth)],
                                     generators[static_cast<std::size_t>(j - 1)],
                                     stack[static_cast<std::size_t>(depth + 1)]);
            self(self, depth + 1);
        }
    };
    dfs(dfs, 0);
    if (mode.is_exact()) return ModeValue::from_exact(std::move(exact_sum));
    return ModeValue::from_float(float_sum);
}

// Tabulates X_n and X_{n,1} for n = 0..n_max.
inline std::vector<XRecord> x_series(Dimension d, int n_max, DeltaMode mode,
                                     const EnumOptions& opts = {}) {
    std::vector<XRecord> records;
    auto emit = [&](int n, std::optional<int> k, ModeValue value) {
        XRecord rec;
        rec.n = n;
        rec.k = k;
        rec.value = std::move(value);
        rec.word_count = k ? partition_word_count(d, n, *k) : words_at_level(d, n);
        records.push_back(std::move(rec));
    };
    if (mode.is_exact()) {
        auto levels = exact_levels(d, n_max, opts);
        for (int n = 0; n <= n_max; ++n) {
            emit(n, std::nullopt, ModeValue::from_exact(levels[static_cast<std::size_t>(n)].total));
            if (n >= 2) {
                emit(n, 1, ModeValue::from_exact(levels[static_cast<std::size_t>(n)].by_k[0]));
            }
        }
    } else {
        auto levels = float_levels(d, n_max, mode.delta(), opts);
        for (int n = 0; n <= n_max; ++n) {
            emit(n, std::nullopt, ModeValue::from_float(levels[static_cast<std::size_t>(n)].total));
            if (n >= 2) {
                emit(n, 1, ModeValue::from_float(levels[static_cast<std::size_t>(n)].by_k[0]));
            }
        }
    }
    return records;
}

}  // namespace rauzy
