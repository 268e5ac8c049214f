#include <doctest.h>

#include <sstream>

#include <json.hpp>

#include "klmi/cli.hpp"
#include "support/temp_file.hpp"

using klmi::testing::TempFile;

namespace {

struct Outcome {
    int status;
    std::string out;
    std::string err;
};

Outcome invoke(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int status = klmi::cli::run(args, out, err);
    return {status, out.str(), err.str()};
}

const char* kWorked = "A,0.0\nA,0.1\nB,10.0\nB,10.1\n";

}  // namespace

TEST_CASE("estimate with h = 1 reports zero") {
    TempFile data(kWorked);
    const auto r = invoke({"estimate", "--points", data.str(), "--metric", "euclidean", "--h", "1"});
    REQUIRE(r.status == 0);
    CHECK(nlohmann::json::parse(r.out)["ie_bits"].get<double>() == 0.0);
}

TEST_CASE("bias from counts") {
    const auto r = invoke({"bias", "--counts", "2,2", "--h", "2"});
    REQUIRE(r.status == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(std::fabs(j["ib_bits"].get<double>() - 1.0 / 3.0) <= 1e-12);
    CHECK(r.out.find("0.333333") != std::string::npos);
}

TEST_CASE("sweep selects h = 2 on the worked file") {
    TempFile data(kWorked);
    const auto r = invoke({"sweep", "--points", data.str(), "--metric", "euclidean", "--h-min", "1",
                           "--h-max", "2"});
    REQUIRE(r.status == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["selected_h"] == 2);
    CHECK(j["ie_bits"].get<double>() == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("sweep default range is [1, min(64, n - 1)]") {
    TempFile data(kWorked);
    const auto j = nlohmann::json::parse(invoke({"sweep", "--points", data.str()}).out);
    CHECK(j["sweep"].size() == 3);
}

TEST_CASE("matrix input, tsv output, tab delimiter and header") {
    TempFile data("label\td1\td2\td3\td4\nA\t0\t0.1\t10\t10.1\nA\t0.1\t0\t9.9\t10\n"
                  "B\t10\t9.9\t0\t0.1\nB\t10.1\t10\t0.1\t0\n");
    const auto r = invoke({"estimate", "--matrix", data.str(), "--delimiter", "tab", "--header", "--h", "2",
                           "--format", "tsv"});
    REQUIRE(r.status == 0);
    CHECK(r.out == "n\tn_x\th\ti0_bits\tib_bits\tie_bits\n4\t2\t2\t1\t0.33333333333333331\t0.66666666666666674\n");
}

TEST_CASE("estimator flags reach the estimator") {
    TempFile data(kWorked);
    const auto nx = nlohmann::json::parse(
        invoke({"estimate", "--points", data.str(), "--h", "2", "--nx-override", "4"}).out);
    CHECK(nx["n_x"] == 4);
    CHECK(nx["i0_bits"].get<double>() == doctest::Approx(2.0));
    const auto nc = nlohmann::json::parse(
        invoke({"estimate", "--points", data.str(), "--h", "2", "--log-variant", "nc"}).out);
    CHECK(nc["ib_bits"].get<double>() == doctest::Approx(1.0 / 3.0));  // n_c = n_x here

    // Seed 0 sees A at 1 and B at 1.0000001: exact ordering picks A, a
    // tolerance of 1e-3 turns them into one half-weighted tie group.
    TempFile ties("A,0\nA,1\nB,-1.0000001\nB,5\n");
    const auto exact = nlohmann::json::parse(invoke({"estimate", "--points", ties.str(), "--h", "2"}).out);
    const auto loose = nlohmann::json::parse(
        invoke({"estimate", "--points", ties.str(), "--h", "2", "--tie-epsilon", "1e-3"}).out);
    CHECK(loose["i0_bits"].get<double>() < exact["i0_bits"].get<double>());
}

TEST_CASE("simulate runs both oracles and is deterministic") {
    TempFile data(kWorked);
    const std::vector<std::string> perm{"simulate", "--points", data.str(), "--h", "2", "--replicates", "500",
                                        "--seed", "3"};
    const auto a = invoke(perm);
    REQUIRE(a.status == 0);
    CHECK(a.out == invoke(perm).out);
    auto perm_threads = perm;
    perm_threads.insert(perm_threads.end(), {"--threads", "3"});
    CHECK(a.out == invoke(perm_threads).out);
    const auto j = nlohmann::json::parse(a.out);
    CHECK(j["replicates"] == 500);
    CHECK(j["rng"] == "mt19937_64+splitmix64");

    const auto gen = invoke({"simulate", "--counts", "30,20", "--h", "3", "--replicates", "50", "--seed", "1"});
    REQUIRE(gen.status == 0);
    CHECK(nlohmann::json::parse(gen.out)["n"] == 50);
    const auto lp = invoke({"simulate", "--counts", "30,20", "--h", "3", "--replicates", "50", "--family",
                            "label-permutation", "--dim", "3", "--format", "tsv"});
    CHECK(lp.status == 0);
}

TEST_CASE("help exits zero and documents every flag") {
    const auto r = invoke({"--help"});
    CHECK(r.status == 0);
    for (const char* flag : {"--points", "--matrix", "--metric", "--h", "--h-min", "--h-max", "--counts",
                             "--tie-epsilon", "--nx-override", "--log-variant", "--format", "--seed",
                             "--replicates", "--threads", "--header", "--delimiter"})
        CHECK_MESSAGE(r.out.find(flag) != std::string::npos, flag);
    const auto sub = invoke({"sweep", "--help"});
    CHECK(sub.status == 0);
    CHECK(sub.out.find("--h-max") != std::string::npos);
}

TEST_CASE("usage errors exit 2, data errors exit 1") {
    TempFile data(kWorked);
    CHECK(invoke({}).status == 2);
    CHECK(invoke({"estimate", "--points", data.str(), "--h", "2", "--bogus"}).status == 2);
    CHECK(invoke({"estimate", "--points", data.str()}).status == 2);
    CHECK(invoke({"estimate", "--h", "2"}).status == 2);
    CHECK(invoke({"estimate", "--points", data.str(), "--matrix", data.str(), "--h", "2"}).status == 2);
    CHECK(invoke({"estimate", "--points", data.str(), "--h", "2", "--format", "xml"}).status == 2);
    CHECK(invoke({"estimate", "--points", data.str(), "--h", "2", "--metric", "cosine"}).status == 2);
    CHECK(invoke({"estimate", "--points", data.str(), "--h", "0"}).status == 2);
    CHECK(invoke({"estimate", "--points", data.str(), "--h", "2", "--tie-epsilon", "-1"}).status == 2);
    CHECK(invoke({"sweep", "--points", data.str(), "--h-min", "3", "--h-max", "2"}).status == 2);

    const auto big_h = invoke({"estimate", "--points", data.str(), "--h", "9"});
    CHECK(big_h.status == 1);
    CHECK(big_h.err.find("h=9") != std::string::npos);
    CHECK(big_h.err.find('\n') == big_h.err.size() - 1);
    CHECK(invoke({"estimate", "--points", "/nonexistent.csv", "--h", "1"}).status == 1);
    TempFile bad("A,0,1\nB,2,0\n");
    CHECK(invoke({"estimate", "--matrix", bad.str(), "--h", "1"}).status == 1);
    CHECK(invoke({"bias", "--counts", "2,2", "--h", "5"}).status == 1);
}
