#include "grag/prompts.hpp"

#include <sstream>

#include "grag/util.hpp"

namespace grag::prompts {

namespace {

// Benchmark default instruction set, shared by the baseline and gr_rgb.
const char* kRgbInstructions =
    "You are an accurate and reliable AI assistant that can answer questions with the help of "
    "external documents. Please note that external documents may contain noisy or factually "
    "incorrect information. If the information in the document contains the correct answer, you "
    "will give an accurate answer. If the information in the document does not contain the answer, "
    "you will generate 'I cannot answer the question because of the insufficient information in "
    "documents.'. If there are inconsistencies with the facts in some of the documents, please "
    "generate the response 'There are factual errors in the provided documents.' and provide the "
    "correct answer.";

// Noise-aware instruction set for the external-knowledge-only configuration.
const char* kExternalInstructions =
    "You are a helpful assistant tasked with answering questions based on the provided external "
    "documents. The documents may contain noisy or irrelevant information. Your goal is to extract "
    "the necessary information to answer the question accurately, ignoring any irrelevant or noisy "
    "content.\n"
    "Instructions:\n"
    "1. **Focus on Relevant Information**: Carefully analyze the documents and extract only the "
    "information that directly answers the question.\n"
    "2. **Ignore Noise**: If a document contains irrelevant or noisy information, ignore it and "
    "focus on the parts that are relevant to the question.\n"
    "3. **Provide a Clear Answer**: If the answer is found in the documents, provide it clearly "
    "and concisely.\n"
    "4. **Reject if Necessary**: If the documents do not contain sufficient information to answer "
    "the question, respond with:\n"
    "*\"I cannot answer the question due to insufficient information in the documents.";

// Extra rule appended for the combined encoded-plus-external configuration.
const char* kCombinedExtraRule =
    "\n5. **Use Your Own Knowledge if Necessary**: If the documents do not contain sufficient "
    "information, you may also use your own knowledge when documents are insufficient, and you "
    "must clearly say so in your answer.";

// Stock graph-RAG answer prompt (upstream default style).
const char* kDefaultGraphRagInstructions =
    "---Role---\n"
    "\n"
    "You are a helpful assistant responding to a question using the structured data and community "
    "reports provided below.\n"
    "\n"
    "---Goal---\n"
    "\n"
    "Generate a response that answers the user's question, summarizing all information in the "
    "provided data appropriate for the response length and format. If you do not know the answer, "
    "just say so. Do not make anything up. Do not include information where the supporting "
    "evidence for it is not provided.\n"
    "\n"
    "---Target response length and format---\n"
    "\n"
    "A single concise paragraph.";

const char* kProbeInstructions =
    "You are an accurate and reliable AI assistant. Answer the question using your own knowledge.";

std::string context_user_block(const std::string& context, const std::string& question) {
    std::string out;
    out += "STRUCTURED CONTEXT: ";
    out += context;
    out += "\n\nQUESTION: ";
    out += question;
    out += "\n\nOUTPUT:";
    return out;
}

}  // namespace

std::string to_string(ConfigKind kind) {
    switch (kind) {
        case ConfigKind::rgb_baseline: return "rgb";
        case ConfigKind::gr_rgb: return "gr_rgb";
        case ConfigKind::gr_def: return "gr_def";
        case ConfigKind::gr_ext: return "gr_ext";
        case ConfigKind::gr_comb: return "gr_comb";
    }
    return "rgb";
}

ConfigKind config_from_string(const std::string& name) {
    if (name == "rgb" || name == "rgb_baseline" || name == "baseline") return ConfigKind::rgb_baseline;
    if (name == "gr_rgb") return ConfigKind::gr_rgb;
    if (name == "gr_def") return ConfigKind::gr_def;
    if (name == "gr_ext") return ConfigKind::gr_ext;
    if (name == "gr_comb") return ConfigKind::gr_comb;
    throw Error(Error::Kind::invalid_argument, "unknown prompt configuration: " + name);
}

RenderedPrompt render_answer_prompt(const PromptConfig& config, const std::string& context,
                                    const std::string& question) {
    if (question.empty()) {
        throw Error(Error::Kind::invalid_argument, "question must be non-empty");
    }
    const bool probe =
        context.empty() && config.task == corpus::TaskKind::counterfactual &&
        config.kind == ConfigKind::rgb_baseline;
    if (context.empty() && !probe) {
        throw Error(Error::Kind::invalid_argument,
                    "context required for configuration " + to_string(config.kind));
    }

    RenderedPrompt prompt;
    if (probe) {
        prompt.system_text = kProbeInstructions;
        prompt.user_text = "QUESTION: " + question + "\n\nOUTPUT:";
        return prompt;
    }

    switch (config.kind) {
        case ConfigKind::rgb_baseline:
            prompt.system_text = kRgbInstructions;
            prompt.user_text = "DOCUMENTS:\n" + context + "\n\nQUESTION: " + question + "\n\nOUTPUT:";
            break;
        case ConfigKind::gr_rgb:
            prompt.system_text = kRgbInstructions;
            prompt.user_text = context_user_block(context, question);
            break;
        case ConfigKind::gr_def:
            prompt.system_text = kDefaultGraphRagInstructions;
            prompt.user_text = "---Data---\n\n" + context + "\n\n---Question---\n\n" + question +
                               "\n\nOUTPUT:";
            break;
        case ConfigKind::gr_ext:
            prompt.system_text = kExternalInstructions;
            prompt.user_text = context_user_block(context, question);
            break;
        case ConfigKind::gr_comb:
            prompt.system_text = std::string(kExternalInstructions) + kCombinedExtraRule;
            prompt.user_text = context_user_block(context, question);
            break;
    }
    return prompt;
}

RenderedPrompt render_extraction_prompt(const kgraph::Chunk& chunk) {
    RenderedPrompt prompt;
    prompt.system_text =
        "You are a precise information extraction engine. You identify named entities, the "
        "relationships between them, and factual claims about them, and you report each one in a "
        "strict line-delimited record format.";
    std::ostringstream user;
    user << "Extract all entities, relationships, and claims from the text below.\n"
         << "Output one record per line and nothing else, using exactly these formats:\n"
         << "(\"entity\"|<name>|<type>|<short description>|<confidence between 0 and 1>)\n"
         << "(\"relationship\"|<source entity>|<target entity>|<short description>|<co-mention count>)\n"
         << "(\"claim\"|<subject entity>|<factual statement>)\n"
         << "\n"
         << "TEXT:\n"
         << chunk.text << "\n"
         << "\n"
         << "RECORDS:";
    prompt.user_text = user.str();
    return prompt;
}

RenderedPrompt render_extraction_repair_prompt(const kgraph::Chunk& chunk) {
    RenderedPrompt prompt = render_extraction_prompt(chunk);
    prompt.user_text =
        "Your previous reply could not be parsed. Answer again and output ONLY records in the "
        "required format, one per line.\n\n" +
        prompt.user_text;
    return prompt;
}

RenderedPrompt render_summary_prompt(const std::vector<std::string>& member_lines,
                                     std::size_t token_budget) {
    RenderedPrompt prompt;
    prompt.system_text =
        "You are a careful summarizer. You write short, factual summaries of groups of closely "
        "related entities without inventing information.";
    std::ostringstream user;
    user << "Summarize the following group of related entities in at most " << token_budget
         << " tokens. Mention the key entities by name and how they relate.\n\nMEMBERS:\n";
    for (const auto& line : member_lines) {
        user << "- " << line << "\n";
    }
    user << "\nSUMMARY:";
    prompt.user_text = user.str();
    return prompt;
}

RenderedPrompt render_merge_summary_prompt(const std::vector<std::string>& child_summaries,
                                           std::size_t token_budget) {
    RenderedPrompt prompt;
    prompt.system_text =
        "You are a careful summarizer. You combine several community summaries into one without "
        "inventing information.";
    std::ostringstream user;
    user << "Combine the following community summaries into a single summary of at most "
         << token_budget << " tokens.\n\nSUMMARIES:\n";
    for (const auto& summary : child_summaries) {
        user << "- " << summary << "\n";
    }
    user << "\nSUMMARY:";
    prompt.user_text = user.str();
    return prompt;
}

std::vector<std::string> rejection_markers() {
    return {"i cannot answer the question"};
}

std::string error_marker() {
    return "factual errors";
}

}  // namespace grag::prompts
