// Reference retrievers for exercising the needle-in-a-haystack harness:
//   perfect  echoes the whole context (always finds the needle)
//   null     answers nothing
//   window   sees only the last W context tokens, like a model with a short
//            usable window; needs the tokenizer model to detokenize
#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

#include "corpusforge/bbpe.hpp"
#include "corpusforge/util.hpp"

using nlohmann::json;

int main(int argc, char** argv) {
    CLI::App app{"niah_oracle: reference retrievers for the NIAH harness"};
    std::string mode = "perfect";
    uint64_t window = 0;
    std::string model_path, case_path, answer_path;
    app.add_option("--mode", mode, "perfect | null | window")->required();
    app.add_option("--window", window, "visible suffix length in tokens (window mode)");
    app.add_option("--model", model_path, "tokenizer model (window mode)");
    app.add_option("case", case_path, "case JSON")->required();
    app.add_option("answer", answer_path, "answer output path")->required();
    CLI11_PARSE(app, argc, argv);

    try {
        const json case_doc = json::parse(corpusforge::read_text_file(case_path));
        std::string answer;
        if (mode == "perfect") {
            answer = case_doc.at("context").get<std::string>();
        } else if (mode == "null") {
            answer = "";
        } else if (mode == "window") {
            if (window == 0 || model_path.empty()) {
                std::cerr << "window mode needs --window and --model\n";
                return 2;
            }
            const corpusforge::BpeModel model = corpusforge::BpeModel::load(model_path);
            const auto tokens = case_doc.at("tokens").get<std::vector<uint32_t>>();
            const size_t start = tokens.size() > window ? tokens.size() - window : 0;
            answer = model.decode(
                std::span<const uint32_t>(tokens.data() + start, tokens.size() - start));
        } else {
            std::cerr << "unknown mode '" << mode << "'\n";
            return 2;
        }
        corpusforge::write_text_file(answer_path, answer);
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "oracle failed: " << e.what() << "\n";
        return 1;
    }
}
