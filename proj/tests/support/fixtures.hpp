#pragma once

#include <string>
#include <vector>

#include "grag/corpus.hpp"

namespace grag::test {

// A synthetic test case with distinguishable pools. Positive docs mention the
// gold answer city; negatives talk about something else entirely.
inline corpus::TestCase make_case(const std::string& id, corpus::TaskKind task,
                                  std::size_t positives = 8, std::size_t negatives = 8,
                                  std::size_t counterfactuals = 0) {
    corpus::TestCase test_case;
    test_case.id = id;
    test_case.task = task;
    test_case.question = "What is the capital of Examplia according to case " + id + "?";
    if (task == corpus::TaskKind::integration) {
        test_case.gold_answers = {{"Aldoria"}, {"Borvia"}};
    } else {
        test_case.gold_answers = {{"Aldoria", "the Aldorian capital"}};
    }
    for (std::size_t i = 0; i < positives; ++i) {
        test_case.positive_docs.push_back(
            "Report " + std::to_string(i) + " for case " + id +
            ": The National Census Bureau confirms that Aldoria City serves as the capital of "
            "Examplia, while Borvia remains its largest port. Prime Minister Halden Cross opened "
            "the new archive wing there.");
    }
    for (std::size_t i = 0; i < negatives; ++i) {
        test_case.negative_docs.push_back(
            "Bulletin " + std::to_string(i) + " for case " + id +
            ": The Marine Weather Service warns of strong winds near Cape Tarn. Fishing Vessel "
            "Dorado reported high swells, and Harbor Master Quint delayed all departures.");
    }
    for (std::size_t i = 0; i < counterfactuals; ++i) {
        test_case.counterfactual_docs.push_back(
            "Gazette " + std::to_string(i) + " for case " + id +
            ": Contrary to older records, Velmont Town is described here as the capital of "
            "Examplia, a statement the Census Bureau later retracted.");
    }
    return test_case;
}

inline std::vector<corpus::TestCase> make_testset(corpus::TaskKind task, std::size_t count,
                                                  std::size_t counterfactuals = 0) {
    std::vector<corpus::TestCase> cases;
    cases.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        cases.push_back(make_case("case-" + std::to_string(i), task, 8, 8, counterfactuals));
    }
    return cases;
}

}  // namespace grag::test
