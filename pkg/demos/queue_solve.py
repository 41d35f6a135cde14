from cmdp.lab import *

queue_config = QueueConfig()
queue = build_queue(queue_config)


def main():
    for label, constrained in (('constrained', True), ('unconstrained', False)):
        occupancy, objective = solve_true_model(queue, constrained=constrained)
        policy = extract_policy(occupancy)
        print('%s optimum %.4f, average costs %s' % (label, queue.original_reward(objective), queue.original_costs(occupancy.channel_values(queue.costs))))
        for state in range(queue.n_states):
            action = int(np.argmax(policy.action_probs[state]))
            print('  %d packets: service %.2f, flow %.2f' % ((state,) + queue_config.action_pair(action)))


if __name__ == '__main__':
    main()
