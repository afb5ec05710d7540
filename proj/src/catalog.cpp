#include "adaudit/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "adaudit/csv.hpp"
#include "adaudit/errors.hpp"

namespace adaudit::catalog {

const char* sector_name(Sector s) {
    switch (s) {
        case Sector::ForProfit: return "for_profit";
        case Sector::Public: return "public";
        default: return "private_nonprofit";
    }
}

Sector sector_from_name(const std::string& name) {
    if (name == "for_profit") return Sector::ForProfit;
    if (name == "public") return Sector::Public;
    if (name == "private_nonprofit") return Sector::PrivateNonProfit;
    throw ConfigError("unknown sector: " + name);
}

void School::validate() const {
    if (name.empty()) throw ValidationError("school with empty name");
    const double sum = pct_black + pct_white + pct_other;
    if (std::abs(sum - 100.0) > 1.0) {
        throw ValidationError(name + ": race percentages sum to " + std::to_string(sum));
    }
    if (admit_rate < 0.0 || admit_rate > 100.0) {
        throw ValidationError(name + ": admit rate out of range");
    }
}

void SchoolPair::validate() const {
    skewed_school.validate();
    public_school.validate();
    if (public_school.sector != Sector::Public) {
        throw ValidationError(pair_id + ": paired school " + public_school.name + " is not public");
    }
    if (skewed_school.sector == Sector::Public) {
        throw ValidationError(pair_id + ": skewed school " + skewed_school.name + " is public");
    }
}

ShortlistResult shortlist(const std::vector<School>& schools, const ShortlistCriteria& c) {
    ShortlistResult out;
    for (const auto& s : schools) {
        if (s.sector == Sector::PrivateNonProfit) continue;
        if (c.require_four_year && !s.four_year) continue;
        if (c.require_online_program && !s.online_program) continue;
        if (s.enrollment < c.min_enrollment) continue;
        if (c.require_active_page && !s.active_platform_page) continue;
        if (c.require_active_advertiser && !s.active_advertiser) continue;
        if (s.admit_rate < c.admit_rate_floor) {
            if (!c.admit_floor_warn_only) continue;
            out.warnings.push_back(s.name + ": admit rate " + std::to_string(s.admit_rate) +
                                   " under floor " + std::to_string(c.admit_rate_floor));
        }
        (s.sector == Sector::ForProfit ? out.for_profit : out.publics).push_back(s);
    }
    return out;
}

namespace {

void sort_by_difference(std::vector<School>& schools, bool black_minus_white) {
    std::sort(schools.begin(), schools.end(), [&](const School& a, const School& b) {
        const double da = black_minus_white ? a.skew_difference() : -a.skew_difference();
        const double db = black_minus_white ? b.skew_difference() : -b.skew_difference();
        if (da != db) return da > db;
        return a.name < b.name;
    });
}

std::vector<SchoolPair> zip_pairs(const std::vector<School>& skewed,
                                  const std::vector<School>& publics) {
    const std::size_t n = std::min(skewed.size(), publics.size());
    std::vector<SchoolPair> pairs;
    pairs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        SchoolPair p{"pair-" + std::to_string(i + 1), skewed[i], publics[i]};
        p.validate();
        pairs.push_back(std::move(p));
    }
    return pairs;
}

}  // namespace

std::vector<SchoolPair> pair_schools(std::vector<School> for_profit, std::vector<School> publics) {
    if (for_profit.empty() || publics.empty()) {
        throw ValidationError("pair_schools: both lists must be nonempty");
    }
    sort_by_difference(for_profit, true);
    sort_by_difference(publics, false);
    return zip_pairs(for_profit, publics);
}

std::vector<SchoolPair> pair_schools_explicit(const std::vector<School>& skewed,
                                              const std::vector<School>& publics) {
    if (skewed.empty() || publics.empty()) {
        throw ValidationError("pair_schools_explicit: both lists must be nonempty");
    }
    return zip_pairs(skewed, publics);
}

std::map<Sector, std::optional<double>> defacto_skew(const std::vector<School>& schools) {
    if (schools.empty()) throw ValidationError("defacto_skew: empty catalog");
    std::map<Sector, double> weighted;
    std::map<Sector, double> enrollment;
    for (const auto& s : schools) {
        weighted[s.sector] += s.pct_black * static_cast<double>(s.enrollment);
        enrollment[s.sector] += static_cast<double>(s.enrollment);
    }
    std::map<Sector, std::optional<double>> out;
    for (const auto& [sector, total] : enrollment) {
        if (total > 0.0) out[sector] = weighted[sector] / total;
        else out[sector] = std::nullopt;
    }
    return out;
}

namespace {

std::string format_pct(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

bool parse_bool(const std::string& s) {
    if (s == "1" || s == "true" || s == "yes") return true;
    if (s == "0" || s == "false" || s == "no") return false;
    throw ConfigError("not a boolean: " + s);
}

double parse_double(const std::string& s) {
    try {
        return std::stod(s);
    } catch (const std::exception&) {
        throw ConfigError("not a number: " + s);
    }
}

}  // namespace

std::vector<School> load_catalog_csv(const std::string& path) {
    auto t = csv::read_file(path);
    const auto name = t.require_column("name");
    const auto sector = t.require_column("sector");
    const auto black = t.require_column("pct_black");
    const auto white = t.require_column("pct_white");
    const auto other = t.require_column("pct_other");
    const auto admit = t.require_column("admit_rate");
    const auto enroll = t.require_column("enrollment");
    const auto four = t.require_column("four_year");
    const auto online = t.require_column("online_program");
    const auto page = t.require_column("active_platform_page");
    const auto advertiser = t.require_column("active_advertiser");

    std::vector<School> out;
    out.reserve(t.rows.size());
    for (const auto& row : t.rows) {
        School s;
        s.name = row[name];
        s.sector = sector_from_name(row[sector]);
        s.pct_black = parse_double(row[black]);
        s.pct_white = parse_double(row[white]);
        s.pct_other = parse_double(row[other]);
        s.admit_rate = parse_double(row[admit]);
        s.enrollment = static_cast<std::uint64_t>(std::stoull(row[enroll]));
        s.four_year = parse_bool(row[four]);
        s.online_program = parse_bool(row[online]);
        s.active_platform_page = parse_bool(row[page]);
        s.active_advertiser = parse_bool(row[advertiser]);
        s.validate();
        out.push_back(std::move(s));
    }
    return out;
}

void write_pairs_csv(const std::vector<SchoolPair>& pairs, const std::string& path) {
    csv::Writer w(path);
    w.row({"pair_id", "skewed_school", "skewed_sector", "skewed_pct_black", "skewed_pct_white",
           "skewed_pct_other", "skewed_admit_rate", "public_school", "public_pct_black",
           "public_pct_white", "public_pct_other", "public_admit_rate"});
    for (const auto& p : pairs) {
        w.row({p.pair_id, p.skewed_school.name, sector_name(p.skewed_school.sector),
               format_pct(p.skewed_school.pct_black), format_pct(p.skewed_school.pct_white),
               format_pct(p.skewed_school.pct_other), format_pct(p.skewed_school.admit_rate),
               p.public_school.name, format_pct(p.public_school.pct_black),
               format_pct(p.public_school.pct_white), format_pct(p.public_school.pct_other),
               format_pct(p.public_school.admit_rate)});
    }
    w.close();
}

std::vector<SchoolPair> load_pairs_csv(const std::string& path) {
    auto t = csv::read_file(path);
    const auto pair_id = t.require_column("pair_id");
    const auto sk_name = t.require_column("skewed_school");
    const auto sk_sector = t.require_column("skewed_sector");
    const auto sk_b = t.require_column("skewed_pct_black");
    const auto sk_w = t.require_column("skewed_pct_white");
    const auto sk_o = t.require_column("skewed_pct_other");
    const auto sk_a = t.require_column("skewed_admit_rate");
    const auto pb_name = t.require_column("public_school");
    const auto pb_b = t.require_column("public_pct_black");
    const auto pb_w = t.require_column("public_pct_white");
    const auto pb_o = t.require_column("public_pct_other");
    const auto pb_a = t.require_column("public_admit_rate");

    std::vector<SchoolPair> out;
    for (const auto& row : t.rows) {
        SchoolPair p;
        p.pair_id = row[pair_id];
        p.skewed_school.name = row[sk_name];
        p.skewed_school.sector = sector_from_name(row[sk_sector]);
        p.skewed_school.pct_black = parse_double(row[sk_b]);
        p.skewed_school.pct_white = parse_double(row[sk_w]);
        p.skewed_school.pct_other = parse_double(row[sk_o]);
        p.skewed_school.admit_rate = parse_double(row[sk_a]);
        p.public_school.name = row[pb_name];
        p.public_school.sector = Sector::Public;
        p.public_school.pct_black = parse_double(row[pb_b]);
        p.public_school.pct_white = parse_double(row[pb_w]);
        p.public_school.pct_other = parse_double(row[pb_o]);
        p.public_school.admit_rate = parse_double(row[pb_a]);
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace adaudit::catalog
