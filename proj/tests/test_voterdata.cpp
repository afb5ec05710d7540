#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "adaudit/errors.hpp"
#include "adaudit/rng.hpp"
#include "adaudit/csv.hpp"
#include "adaudit/voterdata.hpp"

using namespace adaudit;
using voter::DmaGroup;
using voter::Race;

namespace {

namespace fs = std::filesystem;

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name, const std::string& content) {
        path = (fs::temp_directory_path() / name).string();
        std::ofstream out(path, std::ios::binary);
        out << content;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

voter::VoterSchema demo_schema() {
    voter::VoterSchema s;
    s.id_column = "voter_id";
    s.race_column = "race_code";
    s.dma_column = "dma";
    s.state_column = "state";
    s.race_codes = {{"B", Race::Black}, {"W", Race::White}};
    return s;
}

}  // namespace

TEST_CASE("ingest counts rows and maps race codes") {
    TempFile f("adaudit_voters6.csv",
               "voter_id,race_code,dma,state\n"
               "v1,B,Raleigh-Durham,NC\n"
               "v2,B,Raleigh-Durham,NC\n"
               "v3,B,Wilmington,NC\n"
               "v4,W,Charlotte,NC\n"
               "v5,W,Charlotte,NC\n"
               "v6,W,Greensboro,NC\n");
    const auto result = voter::ingest_voter_file(f.path, demo_schema());
    CHECK(result.rows_ingested == 6);
    REQUIRE(result.dataset.size() == 6);
    int black = 0, white = 0;
    for (const auto& ind : result.dataset.individuals()) {
        if (ind.race == Race::Black) ++black;
        if (ind.race == Race::White) ++white;
    }
    CHECK(black == 3);
    CHECK(white == 3);
    // contact key defaults to the record id
    CHECK(result.dataset.individuals()[0].contact_key == "v1");
}

TEST_CASE("unrecognized race codes become Other") {
    TempFile f("adaudit_voters_unk.csv",
               "voter_id,race_code,dma,state\n"
               "v1,B,Raleigh-Durham,NC\n"
               "v2,X,Raleigh-Durham,NC\n");
    const auto result = voter::ingest_voter_file(f.path, demo_schema());
    CHECK(result.dataset.individuals()[1].race == Race::Other);
}

TEST_CASE("ingest error paths") {
    SUBCASE("missing mapped column") {
        TempFile f("adaudit_voters_badcol.csv", "voter_id,race_code,state\nv1,B,NC\n");
        CHECK_THROWS_AS(voter::ingest_voter_file(f.path, demo_schema()), ConfigError);
    }
    SUBCASE("unreadable file") {
        CHECK_THROWS_AS(voter::ingest_voter_file("/no/such/file.csv", demo_schema()), IoError);
    }
    SUBCASE("schema without region mapping") {
        voter::VoterSchema s = demo_schema();
        s.dma_column.clear();
        TempFile f("adaudit_voters_any.csv", "voter_id,race_code,dma,state\n");
        CHECK_THROWS_AS(voter::ingest_voter_file(f.path, s), ConfigError);
    }
    SUBCASE("duplicate record ids") {
        TempFile f("adaudit_voters_dup.csv",
                   "voter_id,race_code,dma,state\nv1,B,Raleigh-Durham,NC\nv1,W,Charlotte,NC\n");
        CHECK_THROWS_AS(voter::ingest_voter_file(f.path, demo_schema()), ValidationError);
    }
}

TEST_CASE("county to DMA lookup") {
    voter::VoterSchema s = demo_schema();
    s.dma_column.clear();
    s.county_column = "county";
    s.dma_lookup = {{"WAKE", "Raleigh-Durham"}, {"MECKLENBURG", "Charlotte"}};
    TempFile f("adaudit_voters_county.csv",
               "voter_id,race_code,county,state\nv1,B,WAKE,NC\nv2,W,MECKLENBURG,NC\n");
    const auto result = voter::ingest_voter_file(f.path, s);
    CHECK(result.dataset.dma_of(result.dataset.individuals()[0]) == "Raleigh-Durham");
    CHECK(result.dataset.dma_of(result.dataset.individuals()[1]) == "Charlotte");

    TempFile bad("adaudit_voters_county_bad.csv",
                 "voter_id,race_code,county,state\nv1,B,UNKNOWN,NC\n");
    CHECK_THROWS_AS(voter::ingest_voter_file(bad.path, s), ConfigError);
}

TEST_CASE("summarize counts per group and race") {
    const DmaGroup g1{"group-1", {"Raleigh-Durham", "Wilmington"}};
    const DmaGroup g2{"group-2", {"Charlotte"}};

    SUBCASE("empty dataset gives an all-zero summary") {
        voter::DatasetBuilder b;
        const auto ds = b.build();
        const auto s = voter::summarize(ds, {g1, g2});
        CHECK(s.total() == 0);
        CHECK(s.count("group-1", Race::Black) == 0);
    }

    SUBCASE("direct counts") {
        voter::DatasetBuilder b;
        for (int i = 0; i < 10; ++i) {
            b.add("b" + std::to_string(i), Race::Black, "Raleigh-Durham", "NC");
        }
        for (int i = 0; i < 5; ++i) {
            b.add("w" + std::to_string(i), Race::White, "Charlotte", "NC");
        }
        b.add("stray", Race::Black, "Los Angeles", "CA");  // in no group
        const auto ds = b.build();
        const auto s = voter::summarize(ds, {g1, g2});
        CHECK(s.count("group-1", Race::Black) == 10);
        CHECK(s.count("group-2", Race::White) == 5);
        CHECK(s.count("group-2", Race::Black) == 0);
        CHECK(s.total() == 15);          // the stray row is excluded
        CHECK(s.total() <= ds.size());
    }

    SUBCASE("overlapping groups are rejected") {
        const DmaGroup overlap{"group-3", {"Charlotte", "Wilmington"}};
        voter::DatasetBuilder b;
        b.add("x", Race::Black, "Charlotte", "NC");
        const auto ds = b.build();
        CHECK_THROWS_AS(voter::summarize(ds, {g1, overlap}), ValidationError);
    }

    SUBCASE("randomized fixture matches a line-by-line tally") {
        Rng rng(2024);
        const std::array<std::string, 5> dmas{"Raleigh-Durham", "Wilmington", "Charlotte",
                                              "Greensboro", "Nowhere"};
        voter::DatasetBuilder b;
        std::map<std::pair<std::string, int>, std::uint64_t> want;
        for (int i = 0; i < 5000; ++i) {
            const auto race = static_cast<Race>(rng.below(3));
            const auto& dma = dmas[rng.below(dmas.size())];
            b.add("r" + std::to_string(i), race, dma, "NC");
            std::string group;
            if (dma == "Raleigh-Durham" || dma == "Wilmington") group = "group-1";
            else if (dma == "Charlotte") group = "group-2";
            else continue;
            want[{group, static_cast<int>(race)}]++;
        }
        const auto ds = b.build();
        const auto s = voter::summarize(ds, {g1, g2});
        for (const auto& [key, count] : want) {
            CHECK(s.count(key.first, static_cast<Race>(key.second)) == count);
        }
    }
}

TEST_CASE("summarize by state for state-keyed audiences") {
    voter::DatasetBuilder b;
    b.add("f1", Race::Black, "Miami", "FL");
    b.add("f2", Race::White, "Tampa", "FL");
    b.add("n1", Race::Black, "Charlotte", "NC");
    const auto ds = b.build();
    const auto s = voter::summarize(ds, {{"FL", {"FL"}}, {"NC", {"NC"}}}, /*by_state=*/true);
    CHECK(s.count("FL", Race::Black) == 1);
    CHECK(s.count("FL", Race::White) == 1);
    CHECK(s.count("NC", Race::Black) == 1);
}

TEST_CASE("re-ingesting the same file is idempotent") {
    TempFile f("adaudit_voters_idem.csv",
               "voter_id,race_code,dma,state\n"
               "v1,B,Raleigh-Durham,NC\nv2,W,Charlotte,NC\nv3,B,Wilmington,NC\n");
    const DmaGroup g1{"g1", {"Raleigh-Durham", "Wilmington"}};
    const DmaGroup g2{"g2", {"Charlotte"}};
    const auto s1 = voter::summarize(voter::ingest_voter_file(f.path, demo_schema()).dataset,
                                     {g1, g2});
    const auto s2 = voter::summarize(voter::ingest_voter_file(f.path, demo_schema()).dataset,
                                     {g1, g2});
    CHECK(s1.counts == s2.counts);
}

TEST_CASE("summary export uses the documented columns") {
    voter::DatasetBuilder b;
    b.add("x1", Race::Black, "Raleigh-Durham", "NC");
    b.add("x2", Race::White, "Charlotte", "NC");
    const auto ds = b.build();
    const auto s = voter::summarize(ds, {{"g1", {"Raleigh-Durham"}}, {"g2", {"Charlotte"}}});
    const auto path = (fs::temp_directory_path() / "adaudit_summary.csv").string();
    voter::write_summary_csv(s, path);
    const auto t = csv::read_file(path);
    CHECK(t.header == std::vector<std::string>{"group_id", "race", "count"});
    CHECK(t.rows.size() == 6);  // 2 groups x 3 races
    std::remove(path.c_str());
}

TEST_CASE("normalized store round trip") {
    voter::DatasetBuilder b;
    b.add("v1", Race::Black, "Raleigh-Durham", "NC", "ck-1");
    b.add("v2", Race::Other, "Charlotte", "NC", "ck-2");
    const auto ds = b.build();
    const auto path = (fs::temp_directory_path() / "adaudit_norm.csv").string();
    voter::write_normalized(ds, path);
    const auto loaded = voter::load_normalized(path);
    REQUIRE(loaded.size() == 2);
    CHECK(loaded.individuals()[0].contact_key == "ck-1");
    CHECK(loaded.individuals()[1].race == Race::Other);
    CHECK(loaded.dma_of(loaded.individuals()[0]) == "Raleigh-Durham");
    std::remove(path.c_str());
}

// Full-scale marginals check: a fixture constructed to the published voter
// dataset sizes for the two DMA groups. Slow (millions of rows) but the
// counts must come out exact.
TEST_CASE("group marginals at full dataset scale") {
    const std::array<std::string, 4> g1_dmas{"Raleigh-Durham", "Wilmington",
                                             "Greenville-Spartaburg", "Norfolk-Portsmouth"};
    const std::array<std::string, 3> g2_dmas{"Charlotte", "Greensboro", "Greenville-New Bern"};
    const std::uint64_t g1_black = 697492, g1_white = 2282243;
    const std::uint64_t g2_black = 818599, g2_white = 2564627;

    const auto path = (fs::temp_directory_path() / "adaudit_table2.csv").string();
    {
        std::ofstream out(path, std::ios::binary);
        out << "voter_id,race_code,dma,state\n";
        std::uint64_t id = 0;
        auto emit = [&](const char* code, const auto& dmas, std::uint64_t count) {
            for (std::uint64_t i = 0; i < count; ++i) {
                out << "nc-" << id++ << ',' << code << ',' << dmas[i % dmas.size()] << ",NC\n";
            }
        };
        emit("B", g1_dmas, g1_black);
        emit("W", g1_dmas, g1_white);
        emit("B", g2_dmas, g2_black);
        emit("W", g2_dmas, g2_white);
    }

    const auto result = voter::ingest_voter_file(path, demo_schema());
    std::remove(path.c_str());
    CHECK(result.rows_ingested == g1_black + g1_white + g2_black + g2_white);

    DmaGroup g1{"group-1", {g1_dmas.begin(), g1_dmas.end()}};
    DmaGroup g2{"group-2", {g2_dmas.begin(), g2_dmas.end()}};
    const auto s = voter::summarize(result.dataset, {g1, g2});
    CHECK(s.count("group-1", Race::Black) == 697492);
    CHECK(s.count("group-1", Race::White) == 2282243);
    CHECK(s.count("group-2", Race::Black) == 818599);
    CHECK(s.count("group-2", Race::White) == 2564627);
    // every row belongs to a group, so the summary covers the whole dataset
    CHECK(s.total() == result.dataset.size());
}
