use clonewt::metric::load_instance_csv;
use clonewt::numeric::q;
use clonewt::{load_instance, neighborhood_graph, Density, Graph, GraphWeighting, MetricWeighting, Rule, WeightVector, WeightsDocument};

fn cu(alpha: f64) -> MetricWeighting {
    MetricWeighting::from_rule(Rule::parse("cu").unwrap(), Density::uniform(alpha).unwrap()).exact(true)
}

#[test]
fn json_and_csv_instances_weigh_alike() {
    let json = load_instance(r#"{"labels":["p","q","r"],"kind":"points","dim":1,"points":[[0],[0.4],[2]]}"#).unwrap();
    let csv = load_instance_csv("p,q,r\n0,0.4,2\n0.4,0,1.6\n2,1.6,0\n", 1e-9).unwrap();
    let a = cu(1.0).evaluate_all(&json).unwrap();
    let b = cu(1.0).evaluate_all(&csv).unwrap();
    assert_eq!(a, b);
    assert_eq!(a, WeightVector::Exact(vec![q(17, 60), q(17, 60), q(13, 30)]));
}

#[test]
fn documents_survive_a_round_trip() {
    let inst = load_instance(r#"{"kind":"matrix","distances":[[0,0.5,3],[0.5,0,3],[3,3,0]]}"#).unwrap();
    let w = cu(1.0).evaluate_all(&inst).unwrap();
    let doc = WeightsDocument::new(Some(1.0), "cu", inst.labels().to_vec(), w).unwrap();
    assert_eq!(WeightsDocument::from_json_str(&doc.to_json_string()).unwrap(), doc);
}

#[test]
fn exported_graphs_parse_back() {
    let inst = load_instance(r#"{"kind":"points","dim":2,"points":[[0,0],[0.3,0],[0.3,0.3],[2,2]]}"#).unwrap();
    let g = neighborhood_graph(&inst, 0.35);
    let back = Graph::parse_edge_list(&g.to_edge_list()).unwrap();
    assert_eq!(back.labels(), g.labels());
    assert_eq!(back.edges().collect::<Vec<_>>(), g.edges().collect::<Vec<_>>());
    let rule = Rule::parse("mcca").unwrap();
    assert_eq!(rule.weigh(&back).unwrap(), rule.weigh(&g).unwrap());
}
