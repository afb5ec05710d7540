#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "adaudit/csv.hpp"
#include "adaudit/errors.hpp"

using namespace adaudit;

TEST_CASE("csv parses headers, quoting, and crlf") {
    const auto t = csv::read_string("a,b,c\r\n1,\"two, with comma\",\"say \"\"hi\"\"\"\n\n,,\n");
    REQUIRE(t.header.size() == 3);
    REQUIRE(t.rows.size() == 2);  // the blank interior line is skipped
    CHECK(t.rows[0][1] == "two, with comma");
    CHECK(t.rows[0][2] == "say \"hi\"");
    CHECK(t.rows[1][0] == "");
    CHECK(t.column("b") == 1);
    CHECK(t.column("zz") == -1);
    CHECK_THROWS_AS(t.require_column("zz"), ConfigError);
    CHECK_THROWS_AS(csv::read_string("a,b,c\n1,2\n"), ValidationError);
}

TEST_CASE("csv writer escapes and round-trips") {
    const auto path = (std::filesystem::temp_directory_path() / "adaudit_csv_test.csv").string();
    {
        csv::Writer w(path);
        w.row({"name", "note"});
        w.row({"plain", "with, comma"});
        w.row({"q\"uote", "line"});
        w.close();
    }
    const auto t = csv::read_file(path);
    CHECK(t.rows[0][1] == "with, comma");
    CHECK(t.rows[1][0] == "q\"uote");
    std::remove(path.c_str());

    CHECK_THROWS_AS(csv::read_file("/nonexistent/nope.csv"), IoError);
}
