import sys

from cmdp.lab import *

queue = build_queue()


def main(T=20000, algorithm='cucrl', seed=0):
    env_rng, agent_rng = [np.random.Generator(np.random.Philox(s)) for s in np.random.SeedSequence(seed).spawn(2)]
    ledger = RegretLedger(oracle_gain(queue), queue.n_channels, T, trace_interval=T // 10)
    learner = ModelBasedLearner(Environment(queue, env_rng), agent_rng, algorithm, K=1.0)
    learner.run(T, ledger)
    for row in ledger.in_units(queue.reward_scale, queue.cost_scales):
        print('t=%6d  R=%9.2f  C_service=%7.2f  C_flow=%7.2f' % row[:4])
    print('%d epochs' % learner.epoch_count)
    return ledger


if __name__ == '__main__':
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 20000, sys.argv[2] if len(sys.argv) > 2 else 'cucrl')
