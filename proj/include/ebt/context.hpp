#pragma once

#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "ebt/cyclotomic.hpp"
#include "ebt/errors.hpp"

namespace ebt {

// Named transcendental symbol of the constant field. A symbol may be linked
// to its logarithm (`log_sym`) or be the logarithm of another (`log_of`);
// exp-capable generators (g, Q, ...) always come as such a pair.
struct SymbolInfo {
    std::string name;
    int log_of = -1;
    int log_sym = -1;
};

// One evolution time q_n^beta. Bilinear identities need two independent
// copies of the time family; `copy` distinguishes them.
struct TimeKey {
    int beta = 0;
    int n = 0;
    int copy = 0;
    friend bool operator<(const TimeKey& a, const TimeKey& b) {
        if (a.copy != b.copy) return a.copy < b.copy;
        if (a.beta != b.beta) return a.beta < b.beta;
        return a.n < b.n;
    }
    friend bool operator==(const TimeKey& a, const TimeKey& b) {
        return a.copy == b.copy && a.beta == b.beta && a.n == b.n;
    }
};

struct HierarchyParams {
    int k = 1;
    int m = 1;
    bool q_symbolic = false; // Q-mode: one (false) | symbolic (true)
    int eps_lo = -4;         // epsilon-degree window
    int eps_hi = 8;
    int x_cap = 12;          // max x-degree
    int band = 6;            // Lambda-window width W
    int time_order = 3;      // total time-degree truncation T
};

// Owner of the cyclotomic ring, the symbol table, and the time table.
// Values (Scalar, Coeff, operators) carry a `const Context*`; the caller
// keeps the Context alive for as long as any value referencing it.
class Context {
public:
    explicit Context(const HierarchyParams& p)
        : par(p), ring_(std::lcm(p.k, p.m)) {
        if (p.k < 1 || p.m < 1) throw ConfigError("k and m must be positive");
        if (p.band < p.k + p.m) throw ConfigError("band width must be >= k+m");
        if (p.time_order < 1) throw ConfigError("time order must be >= 1");
        if (p.eps_lo > 0 || p.eps_hi < 0 || p.x_cap < 0)
            throw ConfigError("windows must contain zero");
        cap_copy[0] = p.time_order;
        cap_copy[1] = p.time_order;
        if (p.q_symbolic) q_sym_ = register_exp_symbol("Q");
    }

    Context(const Context&) = delete;
    Context& operator=(const Context&) = delete;

    const HierarchyParams par;

    const CycRing& ring() const { return ring_; }
    int k() const { return par.k; }
    int m() const { return par.m; }
    int N() const { return ring_.modulus(); }

    // --- symbols ---

    int register_symbol(const std::string& name) {
        auto it = by_name_.find(name);
        if (it != by_name_.end()) return it->second;
        int id = static_cast<int>(symbols_.size());
        symbols_.push_back({name, -1, -1});
        by_name_[name] = id;
        return id;
    }

    // Registers `name` plus its logarithm `log[name]`, linked both ways.
    int register_exp_symbol(const std::string& name) {
        int id = register_symbol(name);
        if (symbols_[id].log_sym < 0) {
            int lg = register_symbol("log[" + name + "]");
            symbols_[id].log_sym = lg;
            symbols_[lg].log_of = id;
        }
        return id;
    }

    int symbol(const std::string& name) const {
        auto it = by_name_.find(name);
        return it == by_name_.end() ? -1 : it->second;
    }

    const SymbolInfo& info(int id) const { return symbols_.at(static_cast<std::size_t>(id)); }
    const std::string& symbol_name(int id) const { return info(id).name; }
    int log_sym(int id) const { return info(id).log_sym; }
    int num_symbols() const { return static_cast<int>(symbols_.size()); }

    bool q_symbolic() const { return par.q_symbolic; }
    int q_sym() const { return q_sym_; }
    int logq_sym() const { return q_sym_ < 0 ? -1 : symbols_[q_sym_].log_sym; }

    // --- times ---

    int register_time(const TimeKey& key) {
        auto it = time_by_key_.find(key);
        if (it != time_by_key_.end()) return it->second;
        if (key.beta < 1 || key.beta > par.k + par.m)
            throw ConfigError("time column out of range");
        if (key.n < 0 || (key.copy != 0 && key.copy != 1))
            throw ConfigError("bad time index");
        if (key.beta == par.k && key.n == 0)
            throw ConfigError("q_0^k is represented by x, not a registered time");
        int id = static_cast<int>(times_.size());
        times_.push_back(key);
        time_by_key_[key] = id;
        return id;
    }

    int time_id(const TimeKey& key) const {
        auto it = time_by_key_.find(key);
        return it == time_by_key_.end() ? -1 : it->second;
    }

    const TimeKey& time_key(int id) const { return times_.at(static_cast<std::size_t>(id)); }
    int num_times() const { return static_cast<int>(times_.size()); }

    // Per-copy truncation order for time monomials. Mutable so computations
    // scoped to a lower total degree can tighten it through a const context
    // (see TimeCapGuard); add_term silently drops terms above the cap.
    mutable int cap_copy[2];

private:
    CycRing ring_;
    std::vector<SymbolInfo> symbols_;
    std::map<std::string, int> by_name_;
    int q_sym_ = -1;
    std::vector<TimeKey> times_;
    std::map<TimeKey, int> time_by_key_;
};

} // namespace ebt
