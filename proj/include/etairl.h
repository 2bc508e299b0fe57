/* C interface to the eta-weighted occupancy IRL engine.
 *
 * Every function returns an etai_status; outputs are opaque handles or
 * malloc'd strings released with the matching *_free call. On any non-OK
 * status, etai_last_error() describes the failure (thread-local storage).
 */
#ifndef ETAIRL_H
#define ETAIRL_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum etai_status {
    ETAI_OK = 0,
    ETAI_ERR_INVALID_ARGUMENT = 1, /* bad parameter or unknown name */
    ETAI_ERR_PARSE = 2,            /* malformed JSON / config document */
    ETAI_ERR_RUNTIME = 3,          /* solver or I/O failure */
    ETAI_ERR_CHECK_FAILED = 4      /* a check suite ran and found violations */
} etai_status;

typedef struct etai_mdp etai_mdp;
typedef struct etai_policy etai_policy;
typedef struct etai_buffer etai_buffer;

const char* etai_version(void);

/* Message for the most recent failure on this thread; never NULL. */
const char* etai_last_error(void);

/* Releases strings returned through char** outputs. NULL is a no-op. */
void etai_string_free(char* s);

/* --- models ------------------------------------------------------------ */

/* Document schema: {n_states, n_actions, transition[s][a][s'], cost[s][a],
 * gamma, p0}. */
etai_status etai_mdp_from_json(const char* json, etai_mdp** out);

/* Named environments: {"name":"chain",...} or {"name":"four_lakes",...}. */
etai_status etai_env_create(const char* env_spec_json, etai_mdp** out);

void etai_mdp_free(etai_mdp* mdp);
etai_status etai_mdp_to_json(const etai_mdp* mdp, char** out);

/* JSON array of violated invariants; empty array means valid. */
etai_status etai_mdp_validate(const etai_mdp* mdp, char** report_json);

etai_status etai_policy_from_json(const char* json, etai_policy** out);
void etai_policy_free(etai_policy* policy);
etai_status etai_policy_to_json(const etai_policy* policy, char** out);

/* --- solving and measures ---------------------------------------------- */

/* Entropy-regularized value iteration on the MDP's own cost. */
etai_status etai_solve_soft(const etai_mdp* mdp, double temperature, double tolerance,
                            int max_iters, etai_policy** out);

/* measure is "rho", "p_eta" or "mu"; eta_spec_json may be NULL for "rho"
 * (and defaults to a point mass at 0 otherwise). Output is CSV with columns
 * s0,s,a,value. */
etai_status etai_occupancy_csv(const etai_mdp* mdp, const etai_policy* policy,
                               const char* measure, const char* eta_spec_json, char** csv_out);

/* --- trajectories ------------------------------------------------------- */

etai_status etai_rollout_buffer(const etai_mdp* mdp, const etai_policy* policy,
                                int n_trajectories, int horizon, unsigned long long seed,
                                etai_buffer** out);
void etai_buffer_free(etai_buffer* buffer);
etai_status etai_buffer_save_jsonl(const etai_buffer* buffer, const char* path);
etai_status etai_buffer_load_jsonl(const char* path, etai_buffer** out);
long long etai_buffer_size(const etai_buffer* buffer);

/* --- high-level runners (JSON config in, artifacts + JSON report out) --- */

/* suite: tower | bijection | flow | eta-optimality | gradient | trpo |
 * entropy-concavity | idle-nash | mmd | all. Returns ETAI_ERR_CHECK_FAILED
 * when the suite ran and failed; report_json is filled either way. */
etai_status etai_check_run(const char* suite, char** report_json);

/* out_dir_override and seeds_csv may be NULL (use the config's values). */
etai_status etai_train_run(const char* config_json, const char* out_dir_override,
                           const char* seeds_csv, char** summary_json);
etai_status etai_sweep_eta_run(const char* config_json, const char* out_dir_override,
                               const char* seeds_csv, char** summary_json);
etai_status etai_gamma_sweep_run(const char* config_json, const char* out_dir_override,
                                 const char* seeds_csv, char** summary_json);
etai_status etai_idle_run(const char* config_json, const char* out_dir_override,
                          const char* seeds_csv, char** summary_json);
etai_status etai_eval_run(const char* config_json, const char* out_dir_override,
                          const char* seeds_csv, char** summary_json);

#ifdef __cplusplus
}
#endif

#endif /* ETAIRL_H */
