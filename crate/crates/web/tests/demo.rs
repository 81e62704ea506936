use learntrace_web::{cluster_sequences_json, density_cuts_json, engagement_demo_json};

#[test]
fn density_cuts_separate_two_modes() {
    let text: Vec<String> = (0..40).map(|i| (10 + i % 3).to_string()).chain((0..40).map(|i| (50 + i % 5).to_string())).collect();
    let v = density_cuts_json(&text.join(" "), 0.0, 1, false).unwrap();
    let cut = v["cuts"][0].as_f64().unwrap();
    assert!(12.0 < cut && cut < 50.0, "{cut}");
    assert_eq!(v["counts"], serde_json::json!([40, 40]));
    assert!(v["svg"].as_str().unwrap().starts_with("<svg"));
    assert!(density_cuts_json("3 x 4", 0.0, 1, true).is_err());
}

#[test]
fn sequence_clusters_get_behavior_labels() {
    let text = "ccccccccc\ncccccccc\ncccccccccc\npspspsps\nspspspsps\npspspspsp\n";
    let v = cluster_sequences_json(text, "average", 2).unwrap();
    let labels = v["labels"].as_array().unwrap();
    assert_eq!(labels[0], labels[1]);
    assert_ne!(labels[0], labels[3]);
    let kinds: Vec<&str> = v["clusters"].as_array().unwrap().iter().map(|c| c["behavior"].as_str().unwrap()).collect();
    assert!(kinds.contains(&"construction") && kinds.contains(&"observation"));
    assert!(cluster_sequences_json("cpx\nccc", "average", 2).is_err());
    assert!(cluster_sequences_json("cp\ncc", "ward", 2).is_err());
}

#[test]
fn engagement_demo_is_seeded() {
    let a = engagement_demo_json(3, 4).unwrap();
    assert_eq!(a, engagement_demo_json(3, 4).unwrap());
    assert_eq!(a["learners"], 300);
    let sizes: u64 = a["groups"].as_array().unwrap().iter().map(|g| g["size"].as_u64().unwrap()).sum();
    assert_eq!(sizes + a["excluded"].as_u64().unwrap(), 300);
}
