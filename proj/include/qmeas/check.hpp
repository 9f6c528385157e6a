#pragma once

// Comparison rows shared by the scenario report and the reproduction report.

#include <cmath>
#include <string>
#include <string_view>
#include <utility>

#include "qmeas/errors.hpp"

namespace qmeas {

enum class CheckKind {
    relative,  ///< |computed - reference| <= tolerance |reference|
    absolute,  ///< |computed - reference| <= tolerance
    minimum,   ///< computed >= reference
    maximum,   ///< computed <= reference
    info,      ///< reported only
};

enum class CheckStatus { pass, fail, note };

[[nodiscard]] inline std::string_view to_string(CheckKind k) noexcept
{
    switch (k) {
    case CheckKind::relative: return "relative";
    case CheckKind::absolute: return "absolute";
    case CheckKind::minimum: return "minimum";
    case CheckKind::maximum: return "maximum";
    case CheckKind::info: return "info";
    }
    return "?";
}

[[nodiscard]] inline CheckKind parse_check_kind(std::string_view s)
{
    for (CheckKind k : {CheckKind::relative, CheckKind::absolute, CheckKind::minimum, CheckKind::maximum,
                        CheckKind::info})
        if (to_string(k) == s)
            return k;
    throw invalid_input("unknown check kind '" + std::string(s) + "'");
}

[[nodiscard]] inline std::string_view to_string(CheckStatus s) noexcept
{
    switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::note: return "note";
    }
    return "?";
}

struct CheckRow
{
    std::string id;
    std::string description;
    double computed = 0.0;
    double reference = 0.0;
    double tolerance = 0.0;
    CheckKind kind = CheckKind::relative;
    std::string note;

    /// Derived from the numbers only.
    [[nodiscard]] CheckStatus status() const noexcept
    {
        if (kind == CheckKind::info)
            return CheckStatus::note;
        if (!std::isfinite(computed))
            return CheckStatus::fail;
        const double d = std::abs(computed - reference);
        switch (kind) {
        case CheckKind::relative: return d <= tolerance * std::abs(reference) ? CheckStatus::pass : CheckStatus::fail;
        case CheckKind::absolute: return d <= tolerance ? CheckStatus::pass : CheckStatus::fail;
        case CheckKind::minimum: return computed >= reference ? CheckStatus::pass : CheckStatus::fail;
        case CheckKind::maximum: return computed <= reference ? CheckStatus::pass : CheckStatus::fail;
        case CheckKind::info: break;
        }
        return CheckStatus::note;
    }
    [[nodiscard]] bool passed() const noexcept { return status() != CheckStatus::fail; }
};

[[nodiscard]] inline CheckRow relative_check(std::string id, std::string description, double computed,
                                             double reference, double tolerance, std::string note = {})
{
    return {std::move(id), std::move(description), computed, reference, tolerance, CheckKind::relative,
            std::move(note)};
}

[[nodiscard]] inline CheckRow absolute_check(std::string id, std::string description, double computed,
                                             double reference, double tolerance, std::string note = {})
{
    return {std::move(id), std::move(description), computed, reference, tolerance, CheckKind::absolute,
            std::move(note)};
}

[[nodiscard]] inline CheckRow minimum_check(std::string id, std::string description, double computed,
                                            double reference, std::string note = {})
{
    return {std::move(id), std::move(description), computed, reference, 0.0, CheckKind::minimum, std::move(note)};
}

[[nodiscard]] inline CheckRow maximum_check(std::string id, std::string description, double computed,
                                            double reference, std::string note = {})
{
    return {std::move(id), std::move(description), computed, reference, 0.0, CheckKind::maximum, std::move(note)};
}

[[nodiscard]] inline CheckRow info_row(std::string id, std::string description, double computed, double reference,
                                       std::string note = {})
{
    return {std::move(id), std::move(description), computed, reference, 0.0, CheckKind::info, std::move(note)};
}

}  // namespace qmeas
