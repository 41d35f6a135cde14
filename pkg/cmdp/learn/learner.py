import logging
import time


logger = logging.getLogger(__name__)


class Learner(object):

    def __init__(self, name, env, rng):
        """
        Base class for online learners that interact with an Environment without resets.

        Subclasses implement `step()` and append one dict per planning round (epoch or episode) to `records`.

        :param name: display name
        :param env: Environment, the learner's only access to the transition kernel
        :param rng: numpy.random.Generator for action sampling and model sampling
        """
        self.name = name
        self.env = env
        self.rng = rng
        self.records = []
        self.time = 1

    record_fields = ()

    def step(self):
        """
        Plays one action in the current environment state.

        :return: tuple (action, next_state, reward, costs)
        """
        raise NotImplementedError(self.__class__)

    def run(self, steps, ledger=None):
        """
        Runs `steps` interactions and records each of them in `ledger`.

        :param steps: number of environment steps
        :param ledger: RegretLedger or None
        :return: ledger
        """
        start = time.time()
        for _ in range(steps):
            _, _, reward, costs = self.step()
            if ledger is not None:
                ledger.record(reward, costs)
        logger.debug('%s ran %d steps in %.2f s' % (self.name, steps, time.time() - start))
        return ledger

    def __repr__(self):
        return '%s(t=%d)' % (self.name, self.time)


class Stopwatch(object):

    def __enter__(self):
        self.start = time.time()
        self.elapsed = 0.0
        return self

    def __exit__(self, *args):
        self.elapsed = time.time() - self.start
