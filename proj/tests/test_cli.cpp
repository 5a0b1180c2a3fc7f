#include <sys/wait.h>

#include <cstdio>
#include <set>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "twic/cli.hpp"

using namespace twic;

namespace {

nlohmann::json parse_out(const CommandResult& r) { return nlohmann::json::parse(r.out); }

}  // namespace

TEST_CASE("capacity command") {
    const auto r = run_cli({"capacity", "--n", "2", "--m", "1", "--nb", "1", "--mb", "1",
                            "--lambda", "1/2"});
    REQUIRE(r.exit_code == 0);
    const auto j = parse_out(r);
    CHECK(j["inner"]["exact"] == "3");
    CHECK(j["outer"]["exact"] == "3");
    CHECK(j["matched"] == true);
    CHECK(j["regime"]["forward"] == "weak");
    CHECK(j["regime"]["netgain"] == "gain");

    const auto zero = run_cli({"capacity", "--n", "2", "--m", "1", "--nb", "1", "--mb", "1",
                               "--lambda", "0"});
    const auto jz = parse_out(zero);
    CHECK(jz["inner"] == jz["outer"]);
    CHECK(jz["inner"]["exact"] == jz["c_no"]["exact"]);

    const auto strong = run_cli({"capacity", "--n", "1", "--m", "3", "--nb", "1", "--mb", "1",
                                 "--lambda", "1/2"});
    CHECK(parse_out(strong)["inner"]["exact"] == "3");
}

TEST_CASE("capacity rejects malformed rationals") {
    CHECK(run_cli({"capacity", "--n", "2", "--m", "1", "--nb", "1", "--mb", "1", "--lambda",
                   "0.5x"})
              .exit_code == 2);
    CHECK(run_cli({"capacity", "--n", "2", "--m", "1", "--nb", "1", "--mb", "1", "--lambda",
                   "3/2"})
              .exit_code == 2);
}

TEST_CASE("simulate command honors the exit-code contract") {
    const auto ok = run_cli({"simulate", "type1", "--n", "1", "--m", "3", "--nb", "1", "--mb",
                             "1", "--lambda", "1/2", "--exhaustive"});
    REQUIRE(ok.exit_code == 0);
    const auto j = parse_out(ok);
    CHECK(j["pass"] == true);
    CHECK(j["rate"]["forward_sum"]["exact"] == "3");
    CHECK(j["messages_tested"] == 64);

    // Regime guard: type1 needs very strong interference.
    const auto guard = run_cli({"simulate", "type1", "--n", "2", "--m", "1", "--nb", "1", "--mb",
                                "1", "--lambda", "1/2"});
    CHECK(guard.exit_code == 2);
    CHECK(guard.out.empty());

    const auto fourmsg = run_cli({"simulate", "fourmsg", "--exhaustive"});
    REQUIRE(fourmsg.exit_code == 0);
    const auto jf = parse_out(fourmsg);
    CHECK(jf["rate"]["forward_sum"]["exact"] == "2");
    CHECK(jf["rate"]["backward_sum"]["exact"] == "1");

    CHECK(run_cli({"simulate", "bogus"}).exit_code == 2);

    // The four-message scheme needs the cross-delivery wiring.
    CHECK(run_cli({"simulate", "fourmsg", "--nb", "1", "--mb", "1"}).exit_code == 2);

    // type2/type3 split on the backward ratio at 1/2.
    CHECK(run_cli({"simulate", "type3", "--n", "3", "--m", "1", "--nb", "1", "--mb", "1",
                   "--lambda", "1/2"})
              .exit_code == 2);
    CHECK(run_cli({"simulate", "type2", "--n", "3", "--m", "1", "--nb", "3", "--mb", "1",
                   "--lambda", "1/2"})
              .exit_code == 2);
}

TEST_CASE("simulate dumps transcripts as JSON lines") {
    const std::string path = "/tmp/twic_dump_test.jsonl";
    std::remove(path.c_str());
    const auto r = run_cli({"simulate", "type2", "--n", "2", "--m", "1", "--nb", "1", "--mb",
                            "1", "--lambda", "1/2", "--exhaustive", "--dump", path});
    REQUIRE(r.exit_code == 0);
    std::ifstream f(path);
    REQUIRE(f.good());
    std::string line;
    int lines = 0;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        const auto j = nlohmann::json::parse(line);
        CHECK(j.contains("x1"));
        ++lines;
    }
    CHECK(lines == 2);
    std::remove(path.c_str());
}

TEST_CASE("netgain CSV matches the reference curve") {
    const auto r = run_cli({"netgain", "--n", "2", "--m", "1", "--nb", "1", "--mb", "1",
                            "--lambda-steps", "5"});
    REQUIRE(r.exit_code == 0);
    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    CHECK(line == "lambda,fb_gain,indep_gain");
    std::vector<std::string> rows;
    while (std::getline(in, line)) rows.push_back(line);
    REQUIRE(rows.size() == 5);
    CHECK(rows[0] == "0,0,0");
    CHECK(rows[2] == "0.5,1,0.5");
    CHECK(rows[4] == "1,1,1");

    // Optimistic (converse-based) column for the unmatched regime.
    const auto ro = run_cli({"netgain", "--n", "3", "--m", "1", "--nb", "3", "--mb", "1",
                             "--lambda-steps", "3", "--outer"});
    REQUIRE(ro.exit_code == 0);
    std::istringstream in2(ro.out);
    std::getline(in2, line);
    CHECK(line == "lambda,fb_gain,indep_gain,fb_gain_outer");
    std::getline(in2, line);
    CHECK(line == "0,0,0,0");
    std::getline(in2, line);
    // At lambda = 1/2 the achievable gain uses the private pipe min(2*lambda*2, 1),
    // the converse allows 2*lambda*3 capped at c_pf - c_no = 1.
    CHECK(line == "0.5,1,2,1");
}

TEST_CASE("regime map rows") {
    const auto r = run_cli({"regime-map", "--max-n", "3", "--max-m", "3", "--max-nb", "3",
                            "--max-mb", "3"});
    REQUIRE(r.exit_code == 0);
    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    CHECK(line == "n,m,nb,mb,alpha,alpha_t,netgain,matched");
    std::set<std::string> rows;
    while (std::getline(in, line)) rows.insert(line);
    CHECK(rows.size() == 81);
    CHECK(rows.count("1,3,1,1,3,1,gain,true") == 1);          // alpha = 3, alpha~ = 1
    CHECK(rows.count("1,1,1,1,1,1,nogain,true") == 1);        // alpha = 1
    CHECK(rows.count("3,1,3,1,0.333333333333333,0.333333333333333,open,false") == 1);
}

TEST_CASE("pair command") {
    const std::string fwd = "/tmp/twic_pair_fwd.txt", bwd = "/tmp/twic_pair_bwd.txt";
    {
        std::ofstream f(fwd);
        f << "1 3\n3 2\n";
        std::ofstream b(bwd);
        b << "4 4\n1 1\n";
    }
    const auto r = run_cli({"pair", "--forwards", fwd, "--backwards", bwd, "--lambda", "1/2"});
    REQUIRE(r.exit_code == 0);
    const auto j = parse_out(r);
    CHECK(j["total_net_gain"]["exact"] == "1/2");
    CHECK(j["pairs"][0]["backward_index"] == 1);

    {
        std::ofstream f(fwd);
        f << "not a pair\n";
    }
    CHECK(run_cli({"pair", "--forwards", fwd, "--backwards", bwd, "--lambda", "1/2"}).exit_code ==
          2);
    std::remove(fwd.c_str());
    std::remove(bwd.c_str());
}

TEST_CASE("weak command") {
    const auto r = run_cli({"weak", "--rt-target", "1"});
    REQUIRE(r.exit_code == 0);
    const auto j = parse_out(r);
    CHECK(j["lambda"]["exact"] == "0");
    CHECK(j["lambda_t"]["exact"] == "1/4");
    CHECK(j["r_sum_bound"]["exact"] == "3/2");

    const auto zero = run_cli({"weak", "--lambda", "0", "--lambda-t", "0"});
    const auto jz = parse_out(zero);
    CHECK(jz["r_sum_bound"]["exact"] == "2");
    CHECK(jz["rt_sum_bound"]["exact"] == "0");

    const auto free_fwd = run_cli({"weak", "--rt-target", "0"});
    CHECK(parse_out(free_fwd)["r_sum_bound"]["exact"] == "3");

    CHECK(run_cli({"weak", "--rt-target", "2"}).exit_code == 1);  // infeasible target
}

TEST_CASE("the installed binary behaves like the library entry point") {
    const std::string bin = TWIC_CLI_BIN;
    const std::string out = "/tmp/twic_proc_out.json";
    int rc = std::system((bin + " capacity --n 1 --m 3 --nb 1 --mb 1 --lambda 1/2 > " + out +
                          " 2>/dev/null")
                             .c_str());
    REQUIRE(WIFEXITED(rc));
    CHECK(WEXITSTATUS(rc) == 0);
    std::ifstream f(out);
    nlohmann::json j;
    f >> j;
    CHECK(j["inner"]["exact"] == "3");

    rc = std::system((bin + " capacity --n 1 --lambda nope > /dev/null 2>&1").c_str());
    REQUIRE(WIFEXITED(rc));
    CHECK(WEXITSTATUS(rc) == 2);

    rc = std::system((bin + " simulate type2 --n 2 --m 1 --nb 1 --mb 1 --lambda 1/2 "
                            "--exhaustive > /dev/null 2>&1")
                         .c_str());
    REQUIRE(WIFEXITED(rc));
    CHECK(WEXITSTATUS(rc) == 0);
    std::remove(out.c_str());
}
