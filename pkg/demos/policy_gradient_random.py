from cmdp.lab import *


def main(T=50000, seed=0):
    rng = np.random.default_rng(seed)
    cmdp = random_ergodic_cmdp(4, 2, 1, rng, slater_margin=0.2)
    ledger = RegretLedger(oracle_gain(cmdp), 1, T)
    # rough mixing and hitting bounds for a model whose transitions are all at least 1/16, shortened epochs
    learner, _ = run_policy_gradient(Environment(cmdp, rng), T, 0.2, rng, oracle=cmdp, h_scale=0.02, n_scale=0.5, t_mix=2, t_hit=4, ledger=ledger)
    print('%s after %d epochs: %s, lambda=%.3f' % (cmdp, learner.epoch, ledger, learner.dual.lam))
    return ledger


if __name__ == '__main__':
    main()
