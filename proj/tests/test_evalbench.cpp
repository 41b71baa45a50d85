#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dicta/evalbench.hpp"

#include <cstdio>
#include <filesystem>

using namespace dicta;
using json = nlohmann::json;

namespace {

message user_msg(std::string content) {
    message m;
    m.msg_role = role::user;
    m.content = std::move(content);
    return m;
}

eval_item judged_item(const std::string & id, const std::string & prompt, const std::string & reference) {
    eval_item item;
    item.id = id;
    item.prompt.messages.push_back(user_msg(prompt));
    item.reference = reference;
    return item;
}

// a judge that always prefers the response containing `winner_mark`
mock_client preferring_judge(const std::string & winner_mark) {
    return mock_client("judge", [winner_mark](const std::vector<message> & msgs) {
        const std::string & text = msgs.at(0).content;
        size_t a = text.find("Response A:\n");
        size_t b = text.find("Response B:\n");
        std::string resp_a = text.substr(a, b - a);
        bool a_wins = resp_a.find(winner_mark) != std::string::npos;
        return std::string(a_wins ? "A" : "B");
    });
}

} // namespace

TEST_CASE("judge_pairwise") {
    SUBCASE("consistent preference for the test response scores 1") {
        auto judge = preferring_judge("good");
        CHECK(judge_pairwise("q", "good answer", "bad answer", judge) == 1.0);
    }
    SUBCASE("consistent preference for the reference scores 0") {
        auto judge = preferring_judge("good");
        CHECK(judge_pairwise("q", "bad answer", "good answer", judge) == 0.0);
    }
    SUBCASE("consistent tie scores 0.5") {
        mock_client judge("judge", [](const std::vector<message> &) { return std::string("TIE"); });
        CHECK(judge_pairwise("q", "x", "y", judge) == 0.5);
    }
    SUBCASE("position bias neutralized: always-picks-A judge scores 0.5") {
        mock_client judge("judge", [](const std::vector<message> &) { return std::string("A"); });
        CHECK(judge_pairwise("q", "x", "y", judge) == 0.5);
        CHECK(judge_pairwise("q", "y", "x", judge) == 0.5);
    }
    SUBCASE("verdict parsed from a wordy reply") {
        mock_client judge("judge", [](const std::vector<message> &) {
            return std::string("After careful consideration the better one is TIE.");
        });
        CHECK(judge_pairwise("q", "x", "y", judge) == 0.5);
    }
    SUBCASE("unparseable verdicts exhaust retries and return nullopt") {
        int calls = 0;
        mock_client judge("judge", [&calls](const std::vector<message> &) {
            calls++;
            return std::string("I refuse to choose");
        });
        judge_options opts;
        opts.retries = 1;
        CHECK_FALSE(judge_pairwise("q", "x", "y", judge, opts).has_value());
        CHECK(calls == 2);  // first query retried once, second never reached
    }
    SUBCASE("empty responses are an error") {
        mock_client judge("judge", [](const std::vector<message> &) { return std::string("A"); });
        CHECK_THROWS_AS(judge_pairwise("q", "", "y", judge), std::runtime_error);
    }
    SUBCASE("template placeholders all filled") {
        mock_client judge("judge", [](const std::vector<message> & msgs) {
            const std::string & t = msgs.at(0).content;
            CHECK(t.find("{prompt}") == std::string::npos);
            CHECK(t.find("{response_a}") == std::string::npos);
            CHECK(t.find("{response_b}") == std::string::npos);
            CHECK(t.find("the question") != std::string::npos);
            return std::string("TIE");
        });
        judge_pairwise("the question", "x", "y", judge);
    }
}

TEST_CASE("score_exact") {
    CHECK(score_exact("Paris", "Paris") == 1.0);
    CHECK(score_exact("Paris", "  Paris \n") == 1.0);
    CHECK(score_exact("Paris", "The capital is:\nParis") == 1.0);
    CHECK(score_exact("Paris", "Paris is the capital") == 0.0);
    CHECK(score_exact("Paris", "paris") == 0.0);
    CHECK(score_exact("ירושלים", "התשובה:\nירושלים") == 1.0);
    CHECK_THROWS_AS(score_exact("", "x"), std::runtime_error);
}

TEST_CASE("score_choice") {
    CHECK(score_choice("הכלב", "החתול", "הכלב") == 1.0);
    CHECK(score_choice("הכלב", "החתול", "התשובה היא הכלב") == 1.0);
    CHECK(score_choice("הכלב", "החתול", "החתול") == 0.0);
    CHECK(score_choice("הכלב", "החתול", "אולי הכלב ואולי החתול") == 0.0);  // ambiguous
    CHECK(score_choice("הכלב", "החתול", "אין לי מושג") == 0.0);
    CHECK_THROWS_AS(score_choice("same", "same", "same"), std::runtime_error);
}

TEST_CASE("run_task") {
    fallback_tokenizer tok;

    SUBCASE("echo-gold model scores 100 on trivia") {
        eval_task task;
        task.name = eval_task_name::trivia;
        std::map<std::string, std::string> gold = {
            {"q1", "a1"}, {"q2", "a2"}, {"q3", "a3"}, {"q4", "a4"},
        };
        for (const auto & [q, a] : gold) {
            eval_item item;
            item.id = q;
            item.prompt.messages.push_back(user_msg(q));
            item.gold = a;
            task.items.push_back(item);
        }
        mock_client model("echo", [&gold](const std::vector<message> & msgs) {
            return gold.at(msgs.back().content);
        });
        auto result = run_task(task, model, nullptr, tok);
        CHECK(result.valid);
        CHECK(result.unscored.empty());
        CHECK(result.aggregate == doctest::Approx(100.0));
        CHECK(result.per_item.size() == 4);
    }
    SUBCASE("3 of 4 trivia answers correct aggregates to 75.00") {
        eval_task task;
        task.name = eval_task_name::trivia;
        for (int i = 0; i < 4; i++) {
            eval_item item;
            item.id = "q" + std::to_string(i);
            item.prompt.messages.push_back(user_msg(item.id));
            item.gold = "right";
            task.items.push_back(item);
        }
        mock_client model("m", [](const std::vector<message> & msgs) {
            return std::string(msgs.back().content == "q3" ? "wrong" : "right");
        });
        auto result = run_task(task, model, nullptr, tok);
        CHECK(result.aggregate == doctest::Approx(75.0));
    }
    SUBCASE("judge verdicts {win, tie, loss, win} aggregate to 62.50") {
        eval_task task;
        task.name = eval_task_name::summarization;
        task.items = {
            judged_item("s1", "p1", "ref"), judged_item("s2", "p2", "ref"),
            judged_item("s3", "p3", "ref"), judged_item("s4", "p4", "ref"),
        };
        mock_client model("m", [](const std::vector<message> & msgs) {
            return "cand for " + std::string(msgs.back().content);
        });
        mock_client judge("judge", [](const std::vector<message> & msgs) -> std::string {
            const std::string & t = msgs.at(0).content;
            if (t.find("p2") != std::string::npos) {
                return "TIE";
            }
            bool cand_is_a = t.find("Response A:\ncand") != std::string::npos;
            bool cand_wins = t.find("p3") == std::string::npos;  // p3 loses, others win
            return (cand_wins == cand_is_a) ? "A" : "B";
        });
        auto result = run_task(task, model, &judge, tok);
        CHECK(result.aggregate == doctest::Approx(62.5));
        CHECK(result.valid);
    }
    SUBCASE("think blocks stripped before scoring, tokens counted on the raw response") {
        eval_task task;
        task.name = eval_task_name::trivia;
        eval_item item;
        item.id = "q";
        item.prompt.messages.push_back(user_msg("q"));
        item.gold = "yes";
        task.items.push_back(item);
        mock_client model("m", [](const std::vector<message> &) {
            return std::string("<think>\nhmm no maybe\n</think>\n\nyes");
        });
        auto result = run_task(task, model, nullptr, tok);
        CHECK(result.aggregate == doctest::Approx(100.0));
        CHECK(result.per_item[0].response_tokens > 1);
    }
    SUBCASE("retryable failures retried, persistent failure marks unscored") {
        eval_task task;
        task.name = eval_task_name::trivia;
        for (int i = 0; i < 20; i++) {
            eval_item item;
            item.id = "q" + std::to_string(i);
            item.prompt.messages.push_back(user_msg(item.id));
            item.gold = "ok";
            task.items.push_back(item);
        }
        int flaky_calls = 0;
        mock_client model("m", [&flaky_calls](const std::vector<message> & msgs) -> std::string {
            if (msgs.back().content == "q0") {
                // fails once, succeeds on retry
                if (flaky_calls++ == 0) {
                    throw client_error("transient", true);
                }
                return "ok";
            }
            if (msgs.back().content == "q1") {
                throw client_error("always down", true);
            }
            return "ok";
        });
        auto result = run_task(task, model, nullptr, tok);
        CHECK(result.per_item.size() == 19);
        REQUIRE(result.unscored.size() == 1);
        CHECK(result.unscored[0] == "q1");
        CHECK(result.valid);  // 1/20 = 5% <= 10%
    }
    SUBCASE("more than 10% unscored invalidates the run") {
        eval_task task;
        task.name = eval_task_name::trivia;
        for (int i = 0; i < 8; i++) {
            eval_item item;
            item.id = "q" + std::to_string(i);
            item.prompt.messages.push_back(user_msg(item.id));
            item.gold = "ok";
            task.items.push_back(item);
        }
        mock_client model("m", [](const std::vector<message> & msgs) -> std::string {
            if (msgs.back().content == "q0") {
                throw client_error("down", false);
            }
            return "ok";
        });
        auto result = run_task(task, model, nullptr, tok);
        CHECK_FALSE(result.valid);
        CHECK(result.per_item.size() == 7);
        CHECK(result.aggregate == doctest::Approx(100.0));  // aggregate still over scored items
    }
    SUBCASE("judge wiring is enforced both ways") {
        eval_task judged;
        judged.name = eval_task_name::translation;
        judged.items = {judged_item("t", "p", "r")};
        eval_task plain;
        plain.name = eval_task_name::trivia;
        eval_item item;
        item.id = "q";
        item.prompt.messages.push_back(user_msg("q"));
        item.gold = "g";
        plain.items.push_back(item);

        mock_client model("m", [](const std::vector<message> &) { return std::string("x"); });
        mock_client judge("j", [](const std::vector<message> &) { return std::string("A"); });
        fallback_tokenizer tok2;
        CHECK_THROWS_AS(run_task(judged, model, nullptr, tok2), std::runtime_error);
        CHECK_THROWS_AS(run_task(plain, model, &judge, tok2), std::runtime_error);
    }
    SUBCASE("winograd choice task end to end") {
        eval_task task;
        task.name = eval_task_name::winograd;
        eval_item item;
        item.id = "w1";
        item.prompt.messages.push_back(user_msg("הגביע לא נכנס למזוודה כי הוא גדול מדי. מה גדול מדי?"));
        item.gold = "הגביע";
        item.options = {"הגביע", "המזוודה"};
        task.items.push_back(item);
        mock_client model("m", [](const std::vector<message> &) { return std::string("הגביע"); });
        auto result = run_task(task, model, nullptr, tok);
        CHECK(result.aggregate == doctest::Approx(100.0));
    }
}

TEST_CASE("transcript record and replay") {
    std::string path = (std::filesystem::temp_directory_path() / "dicta_transcript.jsonl").string();
    std::remove(path.c_str());

    std::vector<message> req = {user_msg("translate שלום")};
    std::string live_answer;
    {
        int live_calls = 0;
        auto inner = std::make_shared<mock_client>("model-a", [&live_calls](const std::vector<message> &) {
            return "response #" + std::to_string(++live_calls);
        });
        transcript log;
        recording_client rec(inner, &log);
        live_answer = rec.complete(req);
        CHECK(rec.complete(req) == live_answer);  // identical request replays, no second live call
        CHECK(live_calls == 1);
        log.save(path);
    }
    {
        transcript log = transcript::load(path);
        replay_client replay("model-a", &log);
        CHECK(replay.complete(req) == live_answer);  // byte-identical across processes

        std::vector<message> other = {user_msg("something never recorded")};
        CHECK_THROWS_AS(replay.complete(other), client_error);
        try {
            replay.complete(other);
        } catch (const client_error & e) {
            CHECK_FALSE(e.retryable);
        }
    }
    std::remove(path.c_str());
}

TEST_CASE("emit_leaderboard") {
    auto result_for = [](const std::string & task, double aggregate) {
        eval_result r;
        r.task = task;
        r.aggregate = aggregate;
        return r;
    };
    SUBCASE("full row, fixed column order, 2 decimals") {
        auto row = emit_leaderboard({
            result_for("trivia", 71.25),
            result_for("summarization", 55.5),
            result_for("translation", 62.0),
            result_for("winograd", 80.0),
            result_for("nikud", 91.333),
        }, "model-x");
        CHECK(row.csv ==
              "model,summarization,translation,winograd,trivia,nikud\n"
              "model-x,55.50,62.00,80.00,71.25,91.33\n");
        CHECK(row.text.find("Summarization") != std::string::npos);
        CHECK(row.text.find("55.50") != std::string::npos);
        CHECK(row.text.find("91.33") != std::string::npos);
    }
    SUBCASE("missing tasks stay blank") {
        auto row = emit_leaderboard({result_for("trivia", 50.0)}, "m");
        CHECK(row.csv == "model,summarization,translation,winograd,trivia,nikud\nm,,,,50.00,\n");
    }
    SUBCASE("duplicate task is an error") {
        CHECK_THROWS_AS(emit_leaderboard({result_for("trivia", 1), result_for("trivia", 2)}, "m"),
                        std::runtime_error);
    }
}

TEST_CASE("eval item json and validation") {
    SUBCASE("string prompt becomes a single user turn") {
        auto item = eval_item_from_json(json{{"id", "x"}, {"prompt", "שאלה"}, {"gold", "תשובה"}});
        REQUIRE(item.prompt.messages.size() == 1);
        CHECK(item.prompt.messages[0].msg_role == role::user);
        CHECK(item.prompt.messages[0].content == "שאלה");
    }
    SUBCASE("round trip") {
        eval_item item;
        item.id = "w";
        item.prompt.messages.push_back(user_msg("p"));
        item.gold = "a";
        item.options = {"a", "b"};
        auto back = eval_item_from_json(eval_item_to_json(item));
        CHECK(back.id == item.id);
        CHECK(back.gold == item.gold);
        CHECK(back.options == item.options);
    }
    SUBCASE("task validation") {
        eval_task judged;
        judged.name = eval_task_name::translation;
        eval_item no_ref;
        no_ref.id = "t";
        no_ref.prompt.messages.push_back(user_msg("p"));
        judged.items.push_back(no_ref);
        CHECK_THROWS_AS(judged.validate(), std::runtime_error);

        eval_task wino;
        wino.name = eval_task_name::winograd;
        eval_item one_opt;
        one_opt.id = "w";
        one_opt.prompt.messages.push_back(user_msg("p"));
        one_opt.gold = "a";
        one_opt.options = {"a"};
        wino.items.push_back(one_opt);
        CHECK_THROWS_AS(wino.validate(), std::runtime_error);
    }
}
