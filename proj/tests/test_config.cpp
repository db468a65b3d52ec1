#include <fstream>
#include <sstream>

#include "bclab/config.hpp"
#include "doctest.h"

using namespace bclab;

TEST_CASE("defaults validate and cover the schema")
{
    Config c;
    CHECK_NOTHROW(c.validate());
    const json j = c.to_json();
    CHECK(j.size() == config_schema().size());
    std::istringstream in(defaults_text());
    std::string line;
    int keys = 0;
    while (std::getline(in, line))
        if (!line.empty() && line[0] != '#') ++keys;
    CHECK(keys == static_cast<int>(config_schema().size()));
}

TEST_CASE("overrides, lists and errors")
{
    Config c;
    c.set_assignment(" K = 40 ");
    CHECK(c.integer("K") == 40);
    c.set("stability.sigma_list", "0, 1e-3");
    CHECK(c.nums("stability.sigma_list") == std::vector<double>{0.0, 1e-3});
    c.set("param.N", "256");
    CHECK(c.preset_params().at("N") == 256);
    CHECK_THROWS_AS(c.set("no.such.key", "1"), Error);
    CHECK_THROWS_AS(c.set("param.N", "many"), Error);
    c.set("span.rank_tol", "-1");
    CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("config files")
{
    const std::string path = "config_test.cfg";
    {
        std::ofstream out(path);
        out << "# comment\npreset = speed-profile-1d\nrecon.widths = 0.1, 0.05  # trailing\n";
    }
    Config c;
    c.load_file(path);
    CHECK(c.str("preset") == "speed-profile-1d");
    CHECK(reconstruction_options(c).values.widths == std::vector<double>{0.1, 0.05});
    std::remove(path.c_str());
    CHECK_THROWS_AS(c.load_file("missing.cfg"), Error);
}
