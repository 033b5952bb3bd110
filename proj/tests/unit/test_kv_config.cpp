#include "mixlap/errors.hpp"
#include "mixlap/kv_config.hpp"

#include <doctest.h>

#include <sstream>

using namespace mixlap;
using namespace mixlap::config;

TEST_SUITE("kv_config") {

TEST_CASE("parses keys, values, comments and blank lines") {
    std::istringstream in("# header\n\nn = 3\ns=0.25   # trailing comment\n  output-dir = out dir  \n");
    const auto e = parse_kv(in);
    REQUIRE(e.size() == 3);
    CHECK(e[0].key == "n");
    CHECK(e[0].value == "3");
    CHECK(e[0].line == 3);
    CHECK(e[1].value == "0.25");
    CHECK(e[2].key == "output-dir");
    CHECK(e[2].value == "out dir");
}

TEST_CASE("malformed input names the line") {
    std::istringstream missing("n = 2\njust words\n");
    CHECK_THROWS_WITH_AS(parse_kv(missing, "cfg"), doctest::Contains("cfg:2"), DomainError);
    std::istringstream empty_key(" = 4\n");
    CHECK_THROWS_AS(parse_kv(empty_key), DomainError);
    std::istringstream dup("n = 2\nn = 3\n");
    CHECK_THROWS_AS(parse_kv(dup), DomainError);
    CHECK_THROWS_AS(read_kv_file("/nonexistent/mixlap.cfg"), DomainError);
}

TEST_CASE("command-line flags win over file entries") {
    const std::vector<Entry> entries{{"n", "3", 1}, {"s", "0.25", 2}, {"threads", "2", 3}};
    const auto merged = merge_config_args(entries, {"--s", "0.75", "--threads=4", "--radii", "1,2"});
    const std::vector<std::string> expected{"--n=3", "--s", "0.75", "--threads=4", "--radii", "1,2"};
    CHECK(merged == expected);
}

}
