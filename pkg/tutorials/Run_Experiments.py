# Runs every configuration in ./configs through the package API and
# collects one summary line per experiment in ./results/summary.txt
from SchwarzRand.Common import check_folder
from SchwarzRand.Config import RunConfig
from SchwarzRand.Cli import execute
from SchwarzRand.Harness import rate_fit, write_csv, write_report
import argparse, os, glob

import numpy as np


if __name__ == '__main__':
    parser = argparse.ArgumentParser()
    parser.add_argument('--seed', type = int, default = 20170515, help = 'seed shared by all experiments')
    parser.add_argument('--runs', type = int, default = None, help = 'override the Monte-Carlo sample size')
    parser.add_argument('--m-max', dest = 'm_max', type = int, default = None)
    args = parser.parse_args()

    config_folder = './configs'
    result_folder = './results'
    check_folder(result_folder)
    summary_file = result_folder + '/summary.txt'

    for config_file in sorted(glob.glob(config_folder + '/*.json')):
        name = os.path.basename(config_file)[:-5]
        if name == 'sweep_grid':
            continue
        config = RunConfig.from_json(config_file).override(seed = args.seed, runs = args.runs,
                                                           m_max = args.m_max).validate()
        result = execute(config)
        curve = result['curve']
        write_csv(result_folder + '/' + name + '.csv', curve, result['records'], result['lower'], result['oracle'])
        write_report(result_folder + '/' + name + '.json', result['report'],
                     dict(config = config.to_dict(), norms = result['norms'].to_dict()))

        slope = np.nan
        if config.m_max >= 16:
            slope = rate_fit(curve, config.m_max // 8, config.m_max)[0]
        with open(summary_file, 'a') as g:
            g.write('\t'.join([name, str(config.seed), str(config.runs), str(config.m_max),
                               repr(float(curve.means[-1])), repr(float(slope)),
                               str(result['report'].satisfied)]) + '\n')
        print(name, 'final mean', curve.means[-1], 'slope', slope, 'bounds satisfied', result['report'].satisfied)
