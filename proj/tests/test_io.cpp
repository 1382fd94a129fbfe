#include <catch2/catch_amalgamated.hpp>

#include <string>

#include "resolv/io.hpp"

using resolv::CsvWriter;
using resolv::ModelMode;
using resolv::ResolvabilityCode;
using resolv::code_from_json;
using resolv::code_to_json;
using resolv::parse_model_json;

namespace {

nlohmann::json bsc_model(double flip) {
    return nlohmann::json{
        {"version", "resolv-model/1"},
        {"mode", "iid"},
        {"sources",
         {{{"labels", {"0", "1"}}, {"pmf", {0.5, 0.5}}}}},
        {"channels",
         {{{"input_labels", {"0", "1"}},
           {"output_labels", {"0", "1"}},
           {"matrix", {{1.0 - flip, flip}, {flip, 1.0 - flip}}}}}}};
}

}  // namespace

TEST_CASE("model parsing") {
    SECTION("a valid symmetric binary model loads") {
        const auto model = parse_model_json(bsc_model(0.1));
        CHECK(model.mode == ModelMode::kIid);
        REQUIRE(model.sources.size() == 1);
        REQUIRE(model.channels.size() == 1);
        CHECK(model.channels[0].prob(0, 1) == 0.1);
        CHECK_FALSE(model.target.has_value());
    }
    SECTION("a row summing to 0.9 names the offending row") {
        auto j = bsc_model(0.1);
        j["channels"][0]["matrix"][1] = {0.5, 0.4};
        try {
            parse_model_json(j);
            FAIL("expected ValidationError");
        } catch (const resolv::ValidationError& e) {
            const std::string what = e.what();
            CHECK(what.find("row 1") != std::string::npos);
            CHECK(what.find("0.9") != std::string::npos);
        }
    }
    SECTION("negative masses are rejected") {
        auto j = bsc_model(0.1);
        j["sources"][0]["pmf"] = {1.2, -0.2};
        CHECK_THROWS_AS(parse_model_json(j), resolv::ValidationError);
    }
    SECTION("unknown version tags are rejected") {
        auto j = bsc_model(0.1);
        j["version"] = "something-else";
        CHECK_THROWS_AS(parse_model_json(j), resolv::ValidationError);
    }
    SECTION("alternating mode needs two pairs") {
        auto j = bsc_model(0.1);
        j["mode"] = "alternating";
        CHECK_THROWS_AS(parse_model_json(j), resolv::ValidationError);
    }
    SECTION("explicit-n mode needs n") {
        auto j = bsc_model(0.1);
        j["mode"] = "explicit-n";
        CHECK_THROWS_AS(parse_model_json(j), resolv::ValidationError);
        j["n"] = 2;
        const auto model = parse_model_json(j);
        CHECK(model.explicit_n == 2);
    }
    SECTION("targets must live on the output alphabet") {
        auto j = bsc_model(0.1);
        j["target"] = {{"labels", {"a", "b"}}, {"pmf", {0.5, 0.5}}};
        CHECK_THROWS_AS(parse_model_json(j), resolv::ValidationError);
        j["target"] = {{"labels", {"0", "1"}}, {"pmf", {0.25, 0.75}}};
        CHECK(parse_model_json(j).target.has_value());
    }
    SECTION("parse errors carry the line number") {
        const char* path = "/tmp/resolv_bad_model.json";
        {
            std::ofstream out(path);
            out << "{\n  \"version\": \"resolv-model/1\",\n  oops\n}\n";
        }
        try {
            resolv::parse_model_file(path);
            FAIL("expected ValidationError");
        } catch (const resolv::ValidationError& e) {
            CHECK(std::string(e.what()).find("line 3") != std::string::npos);
        }
    }
}

TEST_CASE("code serialization round trip") {
    ResolvabilityCode code;
    code.n = 2;
    code.codewords = {"00", "11", "11"};
    code.seed = 77;
    const auto j = code_to_json(code);
    CHECK(j.at("M") == 3);
    const auto back = code_from_json(j);
    CHECK(back.n == 2);
    CHECK(back.codewords == code.codewords);
    CHECK(back.seed == 77);

    SECTION("codeword count must match M") {
        auto bad = j;
        bad["M"] = 5;
        CHECK_THROWS_AS(code_from_json(bad), resolv::ValidationError);
    }
}

TEST_CASE("csv writer") {
    CsvWriter csv;
    csv.row({"a", "b,c", "d\"e"});
    csv.row({CsvWriter::format_double(0.5),
             CsvWriter::format_double(1.0 / 3.0),
             CsvWriter::format_double(1e-12)});
    const std::string expect =
        "a,\"b,c\",\"d\"\"e\"\n0.5,0.333333333333,1e-12\n";
    CHECK(csv.str() == expect);
}
