#include <stdio.h>
#include <string.h>

#include "txsim.h"

static const char *SCENARIO =
    "{\"emitter\": {\"omega_lower\": 0.0, \"omega_upper\": 1.0},"
    " \"absorbers\": [{\"id\": \"a\", \"k_vec\": [1, 0, 0], \"polarization\": 1},"
    "                 {\"id\": \"b\", \"k_vec\": [0, 1, 0], \"polarization\": 2}],"
    " \"offer_amplitudes\": [[0.6, 0], [0, 0.8]],"
    " \"response_model\": {\"kind\": \"always\"},"
    " \"trials\": 1000, \"seed\": 1}";

#define CHECK(expr)                                                        \
    do {                                                                   \
        TxStatus st_ = (expr);                                             \
        if (st_ != TX_STATUS_OK) {                                         \
            fprintf(stderr, "%s -> %d: %s\n", #expr, (int)st_,             \
                    tx_last_error_message());                              \
            return 1;                                                      \
        }                                                                  \
    } while (0)

int main(void) {
    TxScenario *s = NULL;
    TxTrialStats *stats = NULL;
    TxTrialSummary sum;
    TxComplex z;
    uint64_t a = 0, b = 0;

    CHECK(tx_scenario_from_json(SCENARIO, &s));
    CHECK(tx_run_trials(s, 2, &stats));
    CHECK(tx_trial_stats_summary(stats, &sum));
    CHECK(tx_trial_stats_count(stats, 0, &a));
    CHECK(tx_trial_stats_count(stats, 1, &b));
    CHECK(tx_d_feynman(2.0, 0.0, 0.1, &z));

    if (tx_scenario_from_json("{", &s) != TX_STATUS_JSON_PARSE) return 2;
    if (strlen(tx_last_error_message()) == 0) return 3;

    printf("version=%s trials=%llu a=%llu b=%llu dF=%.6f%+.6fi\n", tx_version(),
           (unsigned long long)sum.trials, (unsigned long long)a,
           (unsigned long long)b, z.re, z.im);
    tx_trial_stats_free(stats);
    tx_scenario_free(s);
    return (a + b == sum.trials) ? 0 : 4;
}
