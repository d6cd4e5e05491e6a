#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "grag/prompts.hpp"
#include "grag/util.hpp"

using namespace grag;

namespace {

const std::string kContext = "COMMUNITY SUMMARIES:\n- Aldoria City is the capital of Examplia.";
const std::string kQuestion = "What is the capital of Examplia?";

std::string render_pair(const prompts::RenderedPrompt& prompt) {
    return prompt.system_text + "\n---\n" + prompt.user_text + "\n";
}

std::filesystem::path golden_path(const std::string& name) {
    return std::filesystem::path(GRAG_TEST_DATA_DIR) / "golden" / name;
}

void check_against_golden(const std::string& name, const std::string& rendered) {
    const auto path = golden_path(name);
    INFO("golden file: " << path.string());
    REQUIRE(std::filesystem::exists(path));
    CHECK(rendered == util::read_file(path));
}

prompts::RenderedPrompt render(prompts::ConfigKind kind,
                               corpus::TaskKind task = corpus::TaskKind::noise) {
    return prompts::render_answer_prompt({kind, task}, kContext, kQuestion);
}

}  // namespace

TEST_CASE("gr_rgb carries the benchmark instruction block verbatim") {
    const auto prompt = render(prompts::ConfigKind::gr_rgb);
    // Independent transcription of the printed instruction text.
    CHECK(prompt.system_text.find(
              "You are an accurate and reliable AI assistant that can answer questions with the "
              "help of external documents.") != std::string::npos);
    CHECK(prompt.system_text.find(
              "Please note that external documents may contain noisy or factually incorrect "
              "information.") != std::string::npos);
    CHECK(prompt.system_text.find(
              "'I cannot answer the question because of the insufficient information in "
              "documents.'") != std::string::npos);
    CHECK(prompt.system_text.find(
              "'There are factual errors in the provided documents.' and provide the correct "
              "answer.") != std::string::npos);
    CHECK(prompt.user_text.find("STRUCTURED CONTEXT: " + kContext) != std::string::npos);
    CHECK(prompt.user_text.find(kQuestion) != std::string::npos);
    CHECK(prompt.user_text.find("OUTPUT:") != std::string::npos);
}

TEST_CASE("gr_ext carries the noise-aware instruction set verbatim") {
    const auto prompt = render(prompts::ConfigKind::gr_ext);
    CHECK(prompt.system_text.find(
              "You are a helpful assistant tasked with answering questions based on the provided "
              "external documents.") != std::string::npos);
    CHECK(prompt.system_text.find("1. **Focus on Relevant Information**: Carefully analyze the "
                                  "documents and extract only the information that directly "
                                  "answers the question.") != std::string::npos);
    CHECK(prompt.system_text.find("2. **Ignore Noise**: If a document contains irrelevant or "
                                  "noisy information, ignore it and focus on the parts that are "
                                  "relevant to the question.") != std::string::npos);
    CHECK(prompt.system_text.find("3. **Provide a Clear Answer**: If the answer is found in the "
                                  "documents, provide it clearly and concisely.") !=
          std::string::npos);
    CHECK(prompt.system_text.find("4. **Reject if Necessary**: If the documents do not contain "
                                  "sufficient information to answer the question, respond with:") !=
          std::string::npos);
    CHECK(prompt.system_text.find(
              "*\"I cannot answer the question due to insufficient information in the documents.") !=
          std::string::npos);
}

TEST_CASE("gr_comb is gr_ext plus the own-knowledge rule") {
    const auto ext = render(prompts::ConfigKind::gr_ext);
    const auto comb = render(prompts::ConfigKind::gr_comb);
    CHECK(comb.system_text.rfind(ext.system_text, 0) == 0);
    CHECK(comb.system_text.find("5. **Use Your Own Knowledge if Necessary**") != std::string::npos);
    CHECK(comb.system_text.find("you may also use your own knowledge when documents are "
                                "insufficient") != std::string::npos);
}

TEST_CASE("the baseline renders raw documents in order with no KG vocabulary") {
    const std::string docs = "First document text.\n\nSecond document text.";
    const auto prompt =
        prompts::render_answer_prompt({prompts::ConfigKind::rgb_baseline,
                                       corpus::TaskKind::noise},
                                      docs, kQuestion);
    CHECK(prompt.user_text.find("STRUCTURED CONTEXT") == std::string::npos);
    CHECK(prompt.system_text.find("STRUCTURED CONTEXT") == std::string::npos);
    const auto first = prompt.user_text.find("First document text.");
    const auto second = prompt.user_text.find("Second document text.");
    REQUIRE(first != std::string::npos);
    REQUIRE(second != std::string::npos);
    CHECK(first < second);
}

TEST_CASE("the counterfactual probe renders without documents") {
    const auto prompt = prompts::render_answer_prompt(
        {prompts::ConfigKind::rgb_baseline, corpus::TaskKind::counterfactual}, "", kQuestion);
    CHECK(prompt.user_text.find(kQuestion) != std::string::npos);
    CHECK(prompt.system_text.find("your own knowledge") != std::string::npos);

    // Empty context is illegal everywhere else.
    CHECK_THROWS_AS(prompts::render_answer_prompt(
                        {prompts::ConfigKind::gr_ext, corpus::TaskKind::noise}, "", kQuestion),
                    Error);
}

TEST_CASE("extraction prompt quotes the chunk verbatim") {
    kgraph::Chunk chunk;
    chunk.id = "d0c0";
    chunk.text = "Aldoria City is the capital of Examplia since 1901.";
    const auto prompt = prompts::render_extraction_prompt(chunk);
    CHECK(prompt.user_text.find(chunk.text) != std::string::npos);
    CHECK(prompt.user_text.find("RECORDS:") != std::string::npos);
    const auto repair = prompts::render_extraction_repair_prompt(chunk);
    CHECK(repair.user_text.find("could not be parsed") != std::string::npos);
    CHECK(repair.user_text.find(chunk.text) != std::string::npos);
}

TEST_CASE("summary prompt lists every member") {
    const std::vector<std::string> members = {"Aldoria City (location): capital",
                                              "Borvia (location): port",
                                              "Halden Cross (person): prime minister"};
    const auto prompt = prompts::render_summary_prompt(members, 120);
    for (const auto& member : members) {
        CHECK(prompt.user_text.find(member) != std::string::npos);
    }
    const auto merged = prompts::render_merge_summary_prompt({"child one", "child two"}, 80);
    CHECK(merged.user_text.find("child one") != std::string::npos);
    CHECK(merged.user_text.find("child two") != std::string::npos);
}

TEST_CASE("rendering is pure: identical inputs give identical bytes") {
    for (auto kind : {prompts::ConfigKind::rgb_baseline, prompts::ConfigKind::gr_rgb,
                      prompts::ConfigKind::gr_def, prompts::ConfigKind::gr_ext,
                      prompts::ConfigKind::gr_comb}) {
        const auto a = render(kind);
        const auto b = render(kind);
        CHECK(a.system_text == b.system_text);
        CHECK(a.user_text == b.user_text);
    }
}

TEST_CASE("golden files pin every template") {
    check_against_golden("prompt_rgb_baseline.txt",
                         render_pair(render(prompts::ConfigKind::rgb_baseline)));
    check_against_golden("prompt_gr_rgb.txt", render_pair(render(prompts::ConfigKind::gr_rgb)));
    check_against_golden("prompt_gr_def.txt", render_pair(render(prompts::ConfigKind::gr_def)));
    check_against_golden("prompt_gr_ext.txt", render_pair(render(prompts::ConfigKind::gr_ext)));
    check_against_golden("prompt_gr_comb.txt", render_pair(render(prompts::ConfigKind::gr_comb)));
    check_against_golden("prompt_probe.txt",
                         render_pair(prompts::render_answer_prompt(
                             {prompts::ConfigKind::rgb_baseline, corpus::TaskKind::counterfactual},
                             "", kQuestion)));

    kgraph::Chunk chunk;
    chunk.id = "d0c0";
    chunk.text = "Aldoria City is the capital of Examplia since 1901.";
    check_against_golden("prompt_extraction.txt",
                         render_pair(prompts::render_extraction_prompt(chunk)));
    check_against_golden("prompt_summary.txt",
                         render_pair(prompts::render_summary_prompt(
                             {"Aldoria City (location): capital"}, 120)));
}

TEST_CASE("config kind names round trip") {
    for (auto kind : {prompts::ConfigKind::rgb_baseline, prompts::ConfigKind::gr_rgb,
                      prompts::ConfigKind::gr_def, prompts::ConfigKind::gr_ext,
                      prompts::ConfigKind::gr_comb}) {
        CHECK(prompts::config_from_string(prompts::to_string(kind)) == kind);
    }
    CHECK_THROWS_AS(prompts::config_from_string("nonsense"), Error);
}
