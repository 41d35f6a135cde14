from cmdp.lab import *

chain = weakly_communicating_chain(6, 0.8)


def main(T=5000, seed=0):
    rng = np.random.default_rng(seed)
    ledger = RegretLedger(oracle_gain(chain), 1, T)
    learner, _ = fha_run(Environment(chain, rng), T, span_oracle(chain), 0.1, rng, ledger)
    print('H=%d, K=%d: %s' % (learner.H, learner.K, ledger))
    return ledger


if __name__ == '__main__':
    main()
