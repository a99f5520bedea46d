#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "krein/error.hpp"

namespace krein {

struct CheckRecord {
    std::string name;
    double max_residual = 0.0;
    double tolerance = 0.0;
    bool pass = true;
    std::string error;  // error tag when the check could not be evaluated
    std::string detail; // free-form note, e.g. "skipped: not relatively prime"
};

struct Report {
    std::vector<CheckRecord> checks;
    std::string scenario_hash;
    std::string tool_version;

    [[nodiscard]] bool passed() const {
        return std::all_of(checks.begin(), checks.end(), [](const CheckRecord& c) { return c.pass; });
    }

    [[nodiscard]] const CheckRecord* find(const std::string& name) const {
        for (const auto& c : checks)
            if (c.name == name)
                return &c;
        return nullptr;
    }
};

/// Collects residual samples per named check; a check passes when no sample
/// errored and the largest residual is within tolerance.
class ReportBuilder {
public:
    explicit ReportBuilder(double tolerance) : tolerance_(tolerance) {}

    void record(const std::string& name, double residual) {
        CheckRecord& c = entry(name);
        if (!std::isfinite(residual)) {
            c.error = c.error.empty() ? "NonFiniteResidual" : c.error;
            c.max_residual = std::numeric_limits<double>::max();
            return;
        }
        c.max_residual = std::max(c.max_residual, residual);
    }

    void record_with_tolerance(const std::string& name, double residual, double tolerance) {
        entry(name).tolerance = tolerance;
        overrides_[name] = true;
        record(name, residual);
    }

    void fail(const std::string& name, const Error& e) {
        CheckRecord& c = entry(name);
        if (c.error.empty()) {
            c.error = std::string(to_string(e.kind()));
            c.detail = e.what();
        }
    }

    void fail(const std::string& name, const std::string& tag, const std::string& what) {
        CheckRecord& c = entry(name);
        if (c.error.empty()) {
            c.error = tag;
            c.detail = what;
        }
    }

    void note(const std::string& name, const std::string& detail) {
        CheckRecord& c = entry(name);
        if (c.detail.empty())
            c.detail = detail;
    }

    /// Records sorted by check name.
    [[nodiscard]] std::vector<CheckRecord> finish() const {
        std::vector<CheckRecord> out;
        out.reserve(records_.size());
        for (const auto& [name, rec] : records_) {
            CheckRecord c = rec;
            if (!overrides_.contains(name))
                c.tolerance = tolerance_;
            c.pass = c.error.empty() && c.max_residual <= c.tolerance;
            out.push_back(std::move(c));
        }
        return out;
    }

private:
    CheckRecord& entry(const std::string& name) {
        auto [it, inserted] = records_.try_emplace(name);
        if (inserted)
            it->second.name = name;
        return it->second;
    }

    double tolerance_;
    std::map<std::string, CheckRecord> records_;
    std::map<std::string, bool> overrides_;
};

} // namespace krein
